#include "gridqr/baseline.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridqr/error.hpp"
#include "gridqr/householder.hpp"
#include "gridqr/tsqr.hpp"

namespace gridqr {
namespace {

// Allreduce = reduce up the tree, then broadcast back down it. Logical steps
// keep advancing so each sweep occupies its own band of levels.
class Sweeper {
 public:
  Sweeper(const ReductionTree& tree, Communicator& comm)
      : tree_(tree), comm_(comm), height_(tree.nodes[tree.root].level) {}

  template <class CombineFn>
  void reduce(std::uint64_t values, CombineFn&& combine) {
    for (std::size_t id = tree_.leaf_count; id < tree_.nodes.size(); ++id) {
      const TreeNode& node = tree_.nodes[id];
      comm_.set_step(base_ + node.level);
      comm_.send(tree_.nodes[node.right].owner, node.owner, 8 * values, MessageKind::reduce);
      combine(node.owner, tree_.nodes[node.right].owner);
    }
    base_ += height_;
    ++sweeps_;
  }

  void broadcast(std::uint64_t values) {
    for (std::size_t id = tree_.nodes.size(); id-- > tree_.leaf_count;) {
      const TreeNode& node = tree_.nodes[id];
      comm_.set_step(base_ + height_ + 1 - node.level);
      comm_.send(node.owner, tree_.nodes[node.right].owner, 8 * values, MessageKind::broadcast);
    }
    base_ += height_;
  }

  std::size_t sweeps() const noexcept { return sweeps_; }

 private:
  const ReductionTree& tree_;
  Communicator& comm_;
  std::size_t height_;
  std::size_t base_ = 0;
  std::size_t sweeps_ = 0;
};

void check_shape(std::size_t m, std::size_t n, const ReductionTree& tree, const Communicator& comm) {
  const std::size_t p = tree.leaf_count;
  if (p == 0 || tree.root == kNoNode) throw DimensionError("qr2: empty reduction tree");
  if (p > comm.topology().domain_count()) {
    throw DimensionError("qr2: tree has more leaves than the communicator has domains");
  }
  if (n == 0) throw DimensionError("qr2: matrix has no columns");
  if (m < p * n) {
    throw DimensionError("qr2: " + std::to_string(m) + " rows is too short for " +
                         std::to_string(p) + " domains of width " + std::to_string(n));
  }
}

// Charges the per-domain QR flops spread over the columns in proportion to the
// trailing width, 2(n-j)-1 out of n² for column j.
void charge_column(const std::vector<RowRange>& part, std::size_t n, std::size_t j,
                   Communicator& comm) {
  const double nd = static_cast<double>(n);
  const double share = (2.0 * static_cast<double>(n - j) - 1.0) / (nd * nd);
  for (std::size_t d = 0; d < part.size(); ++d) {
    comm.charge_flops(d, householder_flops(static_cast<double>(part[d].size()), nd) * share);
  }
}

}  // namespace

Qr2Run qr2_factor(const DenseMatrix& a, const ReductionTree& tree, Communicator& comm) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  check_shape(m, n, tree, comm);
  if (!a.all_finite()) throw NonFiniteError("qr2: input has non-finite entries");

  const auto part = partition_rows(m, tree.leaf_count);
  const std::size_t root = tree.nodes[tree.root].owner;
  if (part[root].begin != 0) throw std::logic_error("qr2: tree root does not own the top rows");

  DenseMatrix w = a;
  Sweeper sweep(tree, comm);
  std::vector<std::vector<double>> partial(tree.leaf_count);
  auto add_into = [&](std::size_t dst, std::size_t src) {
    for (std::size_t k = 0; k < partial[dst].size(); ++k) partial[dst][k] += partial[src][k];
  };

  for (std::size_t j = 0; j < n; ++j) {
    charge_column(part, n, j, comm);

    // Norm of the part below the diagonal.
    for (std::size_t d = 0; d < part.size(); ++d) {
      double s = 0.0;
      for (std::size_t i = std::max(part[d].begin, j + 1); i < part[d].end; ++i) s += w(i, j) * w(i, j);
      partial[d].assign(1, s);
    }
    sweep.reduce(1, add_into);

    const double alpha = w(j, j);
    const double xnorm = std::sqrt(partial[root][0]);
    double tau = 0.0;
    double scale = 0.0;
    double beta = alpha;
    if (xnorm != 0.0) {
      beta = -std::copysign(std::hypot(alpha, xnorm), alpha);
      tau = (beta - alpha) / beta;
      scale = 1.0 / (alpha - beta);
    }
    sweep.broadcast(2);  // tau and the scaling factor
    for (std::size_t i = j + 1; i < m; ++i) w(i, j) *= scale;
    w(j, j) = beta;

    if (j + 1 == n) break;

    // vᵀ A(:, j+1:n), with v(j) = 1.
    const std::size_t width = n - j - 1;
    for (std::size_t d = 0; d < part.size(); ++d) {
      partial[d].assign(width, 0.0);
      const std::size_t lo = std::max(part[d].begin, j);
      for (std::size_t c = 0; c < width; ++c) {
        double s = 0.0;
        for (std::size_t i = lo; i < part[d].end; ++i) s += (i == j ? 1.0 : w(i, j)) * w(i, j + 1 + c);
        partial[d][c] = s;
      }
    }
    sweep.reduce(width, add_into);
    const std::vector<double> wsum = partial[root];
    sweep.broadcast(width);
    for (std::size_t c = 0; c < width; ++c) {
      const double t = tau * wsum[c];
      w(j, j + 1 + c) -= t;
      for (std::size_t i = j + 1; i < m; ++i) w(i, j + 1 + c) -= t * w(i, j);
    }
  }

  Qr2Run run;
  run.r = w.block(0, 0, n, n).upper_triangle();
  for (std::size_t j = 0; j < n; ++j) {
    if (!(run.r(j, j) < 0.0)) continue;
    for (std::size_t c = j; c < n; ++c) run.r(j, c) = -run.r(j, c);
  }
  run.costs = comm.report();
  run.reduction_sweeps = sweep.sweeps();
  return run;
}

void simulate_qr2(std::size_t m, std::size_t n, const ReductionTree& tree, Communicator& comm) {
  check_shape(m, n, tree, comm);
  const auto part = partition_rows(m, tree.leaf_count);
  Sweeper sweep(tree, comm);
  auto nothing = [](std::size_t, std::size_t) {};
  for (std::size_t j = 0; j < n; ++j) {
    charge_column(part, n, j, comm);
    sweep.reduce(1, nothing);
    sweep.broadcast(2);
    if (j + 1 == n) break;
    sweep.reduce(n - j - 1, nothing);
    sweep.broadcast(n - j - 1);
  }
}

Comparison compare_runs(const DenseMatrix& a, const Topology& topo, const CompareParams& params) {
  const ReductionTree tsqr_tree = build_tree(topo, params.tsqr_shape, params.procs_per_domain);
  const ReductionTree qr2_tree = build_tree(topo, TreeShape::binary);

  Communicator tsqr_comm(topo);
  const TsqrFactorization f = tsqr_factor(a, tsqr_tree, tsqr_comm);
  Communicator qr2_comm(topo);
  const Qr2Run q = qr2_factor(a, qr2_tree, qr2_comm);

  Comparison out;
  out.tsqr = tsqr_comm.report();
  out.qr2 = q.costs;
  out.r_distance = relative_distance(f.r, q.r);
  out.message_ratio = out.tsqr.critical_path_rounds == 0
                          ? 0.0
                          : static_cast<double>(out.qr2.critical_path_rounds) /
                                static_cast<double>(out.tsqr.critical_path_rounds);
  out.time_ratio = out.tsqr.modeled_time_seconds == 0.0
                       ? 0.0
                       : out.qr2.modeled_time_seconds / out.tsqr.modeled_time_seconds;
  return out;
}

}  // namespace gridqr
