#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridqr/topology.hpp"
#include "gridqr/tree.hpp"

namespace gridqr {

enum class Algo { tsqr, qr2 };

Algo parse_algo(std::string_view name);
std::string to_string(Algo algo);

/// Inputs of the closed-form cost model.
///
/// alpha is seconds per byte (inverse bandwidth), beta seconds per message
/// (latency), gamma seconds per flop on one domain.
struct ModelParams {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  std::uint64_t p = 1;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  bool want_q = false;
  Algo algo = Algo::tsqr;
};

/// Critical-path counts. `volume` is in matrix entries, not bytes.
struct ModelCounts {
  double msgs = 0.0;
  double volume = 0.0;
  double flops = 0.0;
};

/// ceil(log2 p); 0 for p = 1.
std::uint64_t log2_ceil(std::uint64_t p);

/// The R-only table, doubled term by term when want_q:
///
///   qr2:  msgs 2N·L   volume L·N²/2   flops (2MN² − 2/3·N³)/P
///   tsqr: msgs L      volume L·N²/2   flops (2MN² − 2/3·N³)/P + 2/3·L·N³
///
/// with L = log2_ceil(P).
ModelCounts model_counts(const ModelParams& params);

/// β·msgs + α·(8·volume) + γ·flops.
double model_time(const ModelParams& params);

/// Slowest latency and inverse bandwidth among the merges of one tree level.
struct LinkLevel {
  double beta = 0.0;
  double alpha = 0.0;
};

struct LevelProfile {
  std::vector<LinkLevel> levels;  // index 0 is the first merge level
  double gamma = 0.0;             // slowest domain
};

LevelProfile level_profile(const Topology& topo, const ReductionTree& tree);

/// The same table evaluated on a heterogeneous network: each level pays its
/// own β and α, the log term uses levels.size(), and γ is the slowest domain.
/// params.alpha/beta/gamma are ignored. A homogeneous profile with
/// log2_ceil(P) levels reproduces model_time(params) up to rounding.
double model_time(const ModelParams& params, const LevelProfile& profile);

/// Model time of `algo` on a topology: hierarchical tree for tsqr, the
/// rank-ordered binary tree for qr2.
double model_time_on(const Topology& topo, Algo algo, std::uint64_t m, std::uint64_t n,
                     bool want_q = false);

inline constexpr std::uint64_t kCrossoverCap = std::uint64_t{1} << 20;

/// Smallest n in [1, cap] at which the modeled qr2 time drops below the tsqr
/// time (R only), or nullopt. The time difference changes sign at most once in
/// n, so doubling then bisection finds it exactly.
std::optional<std::uint64_t> crossover_n(std::uint64_t m, std::uint64_t p, double alpha,
                                         double beta, double gamma,
                                         std::uint64_t cap = kCrossoverCap);
std::optional<std::uint64_t> crossover_n(std::uint64_t m, std::uint64_t p,
                                         const LevelProfile& tsqr_profile,
                                         const LevelProfile& qr2_profile,
                                         std::uint64_t cap = kCrossoverCap);

struct SpeedupPoint {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  std::size_t sites = 1;
  Algo algo = Algo::tsqr;
  double time_one_site = 0.0;
  double time = 0.0;
  double speedup = 0.0;  // time_one_site / time
};

/// Modeled speedup of running on the first s clusters instead of the first one,
/// for every (m, n, s). domains_per_site = 0 keeps the topology's counts.
std::vector<SpeedupPoint> speedup_curve(const Topology& topo, Algo algo,
                                        std::span<const std::uint64_t> ms,
                                        std::span<const std::uint64_t> ns,
                                        std::span<const std::size_t> sites,
                                        std::size_t domains_per_site = 0, bool want_q = false);

}  // namespace gridqr
