#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gridqr/householder.hpp"
#include "gridqr/matrix.hpp"
#include "gridqr/netsim.hpp"
#include "gridqr/tree.hpp"

namespace gridqr {

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

/// p contiguous ranges covering [0, m); sizes differ by at most one and the
/// first m % p ranges take the extra row.
std::vector<RowRange> partition_rows(std::size_t m, std::size_t p);

struct TsqrOptions {
  QrOptions kernel;
  /// Worker threads for the leaf factorizations. The merges always run in
  /// tree order, so R is bitwise independent of this value.
  std::size_t threads = 1;
};

/// Result of a TSQR reduction. The thin Q is implicit in the leaf and node
/// factors; every stored factor is sign-normalized.
struct TsqrFactorization {
  DenseMatrix r;
  std::vector<HouseholderFactor> leaf_factors;  // indexed by domain
  std::vector<StackedQrFactor> node_factors;    // indexed by node id - leaf_count
  ReductionTree tree;
  std::vector<RowRange> row_partition;  // indexed by domain

  std::size_t rows() const noexcept {
    return row_partition.empty() ? 0 : row_partition.back().end;
  }
  std::size_t cols() const noexcept { return r.cols(); }
};

/// Factor each domain, then merge R factors up the tree. Every merge sends one
/// packed triangle from the right child's owner to the node's owner and is
/// charged to `comm`. Requires a.rows() >= P * a.cols().
TsqrFactorization tsqr_factor(const DenseMatrix& a, const ReductionTree& tree, Communicator& comm,
                              const TsqrOptions& options = {});

/// Thin M x N Q, by pushing [I; 0] back down the tree. When `comm` is given
/// the downward sends and the apply flops are charged to it.
DenseMatrix reconstruct_q(const TsqrFactorization& f, Communicator* comm = nullptr);

/// Q·c for an N x k matrix c, without forming Q.
DenseMatrix apply_q(const TsqrFactorization& f, const DenseMatrix& c);

/// The communication and flop charges of tsqr_factor (and of reconstruct_q
/// when want_q) for an m x n problem, without any matrix data.
void simulate_tsqr(std::size_t m, std::size_t n, const ReductionTree& tree, Communicator& comm,
                   bool want_q);

/// Bytes of one packed n x n triangle of doubles.
std::uint64_t triangle_bytes(std::size_t n);

}  // namespace gridqr
