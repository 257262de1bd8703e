#pragma once

#include <cstddef>

#include "gridqr/matrix.hpp"
#include "gridqr/netsim.hpp"
#include "gridqr/tree.hpp"

namespace gridqr {

/// Outcome of the column-by-column panel factorization (PDGEQR2 pattern).
struct Qr2Run {
  DenseMatrix r;  // sign-normalized
  CostReport costs;
  std::size_t reduction_sweeps = 0;  // 2N - 1: normalization per column, update for all but the last
};

/// Householder QR one column at a time over block rows. Each column allreduces
/// its squared norm, the root forms the reflector and broadcasts it; every
/// column but the last then allreduces vᵀA(trailing) and broadcasts the result.
/// Allreduce is a reduce up `tree` followed by a broadcast down it.
/// Requires a.rows() >= P * a.cols().
Qr2Run qr2_factor(const DenseMatrix& a, const ReductionTree& tree, Communicator& comm);

/// The charges of qr2_factor without matrix data.
void simulate_qr2(std::size_t m, std::size_t n, const ReductionTree& tree, Communicator& comm);

struct CompareParams {
  TreeShape tsqr_shape = TreeShape::hierarchical;
  std::size_t procs_per_domain = 1;  // TSQR only; QR2 always uses every process
};

struct Comparison {
  CostReport tsqr;
  CostReport qr2;
  double r_distance = 0.0;     // ‖R_tsqr − R_qr2‖_F / ‖R_qr2‖_F
  double message_ratio = 0.0;  // qr2 / tsqr reduce rounds
  double time_ratio = 0.0;     // qr2 / tsqr modeled time
};

/// Run both algorithms on the same matrix and topology. QR2 uses the
/// rank-ordered binary tree, TSQR the requested shape.
Comparison compare_runs(const DenseMatrix& a, const Topology& topo, const CompareParams& params = {});

}  // namespace gridqr
