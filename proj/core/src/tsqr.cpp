#include "gridqr/tsqr.hpp"

#include <atomic>
#include <string>
#include <thread>

#include "gridqr/error.hpp"

namespace gridqr {

std::vector<RowRange> partition_rows(std::size_t m, std::size_t p) {
  if (p == 0) throw DimensionError("partition_rows: p must be >= 1");
  if (m < p) {
    throw DimensionError("partition_rows: " + std::to_string(m) + " rows cannot fill " +
                         std::to_string(p) + " domains");
  }
  std::vector<RowRange> out;
  out.reserve(p);
  const std::size_t base = m / p;
  const std::size_t extra = m % p;
  std::size_t begin = 0;
  for (std::size_t d = 0; d < p; ++d) {
    const std::size_t len = base + (d < extra ? 1 : 0);
    out.push_back({begin, begin + len});
    begin += len;
  }
  return out;
}

std::uint64_t triangle_bytes(std::size_t n) { return 8 * packed_triangle_size(n); }

namespace {

void check_shape(std::size_t m, std::size_t n, const ReductionTree& tree, const Communicator& comm) {
  const std::size_t p = tree.leaf_count;
  if (p == 0 || tree.root == kNoNode) throw DimensionError("tsqr: empty reduction tree");
  if (p > comm.topology().domain_count()) {
    throw DimensionError("tsqr: tree has more leaves than the communicator has domains");
  }
  if (n == 0) throw DimensionError("tsqr: matrix has no columns");
  if (m < p * n) {
    throw DimensionError("tsqr: " + std::to_string(m) + " rows is too short for " +
                         std::to_string(p) + " domains of width " + std::to_string(n) +
                         " (need rows >= P*cols)");
  }
}

// Upward sweep shared by the numeric and the counters-only paths.
template <class MergeFn>
void reduce_up(const ReductionTree& tree, const std::vector<RowRange>& part, std::size_t n,
               Communicator& comm, MergeFn&& merge) {
  const double nd = static_cast<double>(n);
  comm.set_step(0);
  for (std::size_t d = 0; d < tree.leaf_count; ++d) {
    comm.charge_flops(d, householder_flops(static_cast<double>(part[d].size()), nd));
  }
  for (std::size_t id = tree.leaf_count; id < tree.nodes.size(); ++id) {
    const TreeNode& node = tree.nodes[id];
    comm.set_step(node.level);
    comm.send(tree.nodes[node.right].owner, node.owner, triangle_bytes(n));
    comm.charge_flops(node.owner, stacked_qr_flops(nd));
    merge(id);
  }
}

// Downward sweep: each merge node applies its Q to [C; 0] and ships the
// bottom block to its right child; the leaves then apply their own Q.
template <class NodeFn, class LeafFn>
void push_down(const ReductionTree& tree, const std::vector<RowRange>& part, std::size_t n,
               Communicator* comm, NodeFn&& at_node, LeafFn&& at_leaf) {
  const double nd = static_cast<double>(n);
  const std::size_t top = tree.nodes[tree.root].level;
  for (std::size_t id = tree.nodes.size(); id-- > tree.leaf_count;) {
    const TreeNode& node = tree.nodes[id];
    if (comm != nullptr) {
      comm->set_step(2 * top + 1 - node.level);
      comm->charge_flops(node.owner, stacked_qr_flops(nd));
      comm->send(node.owner, tree.nodes[node.right].owner, triangle_bytes(n));
    }
    at_node(id);
  }
  if (comm != nullptr) comm->set_step(2 * top + 1);
  for (std::size_t d = 0; d < tree.leaf_count; ++d) {
    if (comm != nullptr) {
      comm->charge_flops(d, householder_flops(static_cast<double>(part[d].size()), nd));
    }
    at_leaf(d);
  }
}

std::vector<HouseholderFactor> factor_leaves(const DenseMatrix& a, const std::vector<RowRange>& part,
                                             const TsqrOptions& options) {
  const std::size_t p = part.size();
  std::vector<HouseholderFactor> leaves(p);
  auto work = [&](std::size_t d) {
    const DenseMatrix block = a.block(part[d].begin, 0, part[d].size(), a.cols());
    leaves[d] = sign_normalize(householder_qr(block, options.kernel));
  };

  const std::size_t workers = std::min(std::max<std::size_t>(1, options.threads), p);
  if (workers == 1) {
    for (std::size_t d = 0; d < p; ++d) work(d);
    return leaves;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t d = next++; d < p; d = next++) work(d);
    });
  }
  pool.clear();  // joins
  return leaves;
}

DenseMatrix push_down_matrix(const TsqrFactorization& f, const DenseMatrix& c, Communicator* comm) {
  const ReductionTree& tree = f.tree;
  const std::size_t n = f.cols();
  if (c.rows() != n) throw DimensionError("apply_q: operand must have N rows");
  const std::size_t k = c.cols();

  std::vector<DenseMatrix> carried(tree.nodes.size());
  carried[tree.root] = c;
  DenseMatrix q(f.rows(), k);

  push_down(
      tree, f.row_partition, n, comm,
      [&](std::size_t id) {
        const TreeNode& node = tree.nodes[id];
        DenseMatrix topb = std::move(carried[id]);
        DenseMatrix bottom(n, k);
        apply_q(f.node_factors[id - tree.leaf_count], topb, bottom);
        carried[node.left] = std::move(topb);
        carried[node.right] = std::move(bottom);
      },
      [&](std::size_t d) {
        const RowRange rows = f.row_partition[d];
        DenseMatrix local(rows.size(), k);
        local.set_block(0, 0, carried[d]);
        q.set_block(rows.begin, 0, apply_q(f.leaf_factors[d], local));
      });
  return q;
}

}  // namespace

TsqrFactorization tsqr_factor(const DenseMatrix& a, const ReductionTree& tree, Communicator& comm,
                              const TsqrOptions& options) {
  check_shape(a.rows(), a.cols(), tree, comm);
  if (!a.all_finite()) throw NonFiniteError("tsqr: input has non-finite entries");

  TsqrFactorization f;
  f.tree = tree;
  f.row_partition = partition_rows(a.rows(), tree.leaf_count);
  f.leaf_factors = factor_leaves(a, f.row_partition, options);
  f.node_factors.resize(tree.merge_count());

  std::vector<const DenseMatrix*> r_of(tree.nodes.size(), nullptr);
  for (std::size_t d = 0; d < tree.leaf_count; ++d) r_of[d] = &f.leaf_factors[d].r;

  reduce_up(tree, f.row_partition, a.cols(), comm, [&](std::size_t id) {
    const TreeNode& node = tree.nodes[id];
    StackedQrFactor& out = f.node_factors[id - tree.leaf_count];
    out = sign_normalize(stacked_qr(*r_of[node.left], *r_of[node.right]));
    r_of[id] = &out.r;
  });

  f.r = *r_of[tree.root];
  return f;
}

DenseMatrix reconstruct_q(const TsqrFactorization& f, Communicator* comm) {
  return push_down_matrix(f, DenseMatrix::identity(f.cols(), f.cols()), comm);
}

DenseMatrix apply_q(const TsqrFactorization& f, const DenseMatrix& c) {
  return push_down_matrix(f, c, nullptr);
}

void simulate_tsqr(std::size_t m, std::size_t n, const ReductionTree& tree, Communicator& comm,
                   bool want_q) {
  check_shape(m, n, tree, comm);
  const auto part = partition_rows(m, tree.leaf_count);
  reduce_up(tree, part, n, comm, [](std::size_t) {});
  if (want_q) push_down(tree, part, n, &comm, [](std::size_t) {}, [](std::size_t) {});
}

}  // namespace gridqr
