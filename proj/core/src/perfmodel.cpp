#include "gridqr/perfmodel.hpp"

#include <algorithm>
#include <stdexcept>

#include "gridqr/error.hpp"

namespace gridqr {

Algo parse_algo(std::string_view name) {
  if (name == "tsqr") return Algo::tsqr;
  if (name == "qr2") return Algo::qr2;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::string to_string(Algo algo) { return algo == Algo::tsqr ? "tsqr" : "qr2"; }

std::uint64_t log2_ceil(std::uint64_t p) {
  if (p == 0) throw DimensionError("log2_ceil: p must be >= 1");
  std::uint64_t l = 0;
  while ((std::uint64_t{1} << l) < p) ++l;
  return l;
}

namespace {

void check_params(const ModelParams& params) {
  if (params.m == 0 || params.n == 0 || params.p == 0) {
    throw DimensionError("model: m, n and p must be positive");
  }
  if (params.alpha < 0.0 || params.beta < 0.0 || params.gamma < 0.0) {
    throw std::invalid_argument("model: alpha, beta and gamma must be >= 0");
  }
}

ModelCounts counts_with_levels(const ModelParams& params, double levels) {
  const double m = static_cast<double>(params.m);
  const double n = static_cast<double>(params.n);
  const double p = static_cast<double>(params.p);
  const double q = params.want_q ? 2.0 : 1.0;

  ModelCounts c;
  c.volume = q * levels * (n * n / 2.0);
  c.flops = q * (2.0 * m * n * n - (2.0 / 3.0) * n * n * n) / p;
  if (params.algo == Algo::tsqr) {
    c.msgs = q * levels;
    c.flops += q * (2.0 / 3.0) * levels * n * n * n;
  } else {
    c.msgs = q * 2.0 * n * levels;
  }
  return c;
}

}  // namespace

ModelCounts model_counts(const ModelParams& params) {
  check_params(params);
  return counts_with_levels(params, static_cast<double>(log2_ceil(params.p)));
}

double model_time(const ModelParams& params) {
  const ModelCounts c = model_counts(params);
  return params.beta * c.msgs + params.alpha * 8.0 * c.volume + params.gamma * c.flops;
}

LevelProfile level_profile(const Topology& topo, const ReductionTree& tree) {
  LevelProfile prof;
  const std::size_t height = tree.root == kNoNode ? 0 : tree.nodes[tree.root].level;
  prof.levels.assign(height, LinkLevel{});
  for (std::size_t id = tree.leaf_count; id < tree.nodes.size(); ++id) {
    const TreeNode& node = tree.nodes[id];
    const std::size_t src = tree.nodes[node.right].owner;
    LinkLevel& lv = prof.levels[node.level - 1];
    lv.beta = std::max(lv.beta, topo.link_latency(src, node.owner));
    lv.alpha = std::max(lv.alpha, topo.inverse_bandwidth(src, node.owner));
  }
  for (std::size_t d = 0; d < tree.leaf_count; ++d) {
    prof.gamma = std::max(prof.gamma, topo.seconds_per_flop(d));
  }
  return prof;
}

double model_time(const ModelParams& params, const LevelProfile& profile) {
  check_params(params);
  const double levels = static_cast<double>(profile.levels.size());
  const ModelCounts c = counts_with_levels(params, levels);
  if (profile.levels.empty()) return profile.gamma * c.flops;

  // Spread the table's msgs and volume evenly over the levels.
  const double msgs_per_level = c.msgs / levels;
  const double bytes_per_level = 8.0 * c.volume / levels;
  double t = 0.0;
  for (const LinkLevel& lv : profile.levels) {
    t += lv.beta * msgs_per_level + lv.alpha * bytes_per_level;
  }
  return t + profile.gamma * c.flops;
}

double model_time_on(const Topology& topo, Algo algo, std::uint64_t m, std::uint64_t n,
                     bool want_q) {
  const TreeShape shape = algo == Algo::tsqr ? TreeShape::hierarchical : TreeShape::binary;
  const ReductionTree tree = build_tree(topo, shape);
  ModelParams params;
  params.m = m;
  params.n = n;
  params.p = topo.domain_count();
  params.want_q = want_q;
  params.algo = algo;
  return model_time(params, level_profile(topo, tree));
}

namespace {

template <class GapFn>
std::optional<std::uint64_t> first_negative(GapFn&& gap, std::uint64_t cap) {
  if (cap == 0) return std::nullopt;
  if (gap(1) < 0.0) return 1;
  std::uint64_t lo = 1;  // gap(lo) >= 0
  std::uint64_t hi = 1;
  while (true) {
    if (hi == cap) return std::nullopt;
    lo = hi;
    hi = std::min(cap, hi * 2);
    if (gap(hi) < 0.0) break;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (gap(mid) < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

std::optional<std::uint64_t> crossover_n(std::uint64_t m, std::uint64_t p, double alpha,
                                         double beta, double gamma, std::uint64_t cap) {
  auto gap = [&](std::uint64_t n) {
    ModelParams params{m, n, p, alpha, beta, gamma, false, Algo::qr2};
    const double qr2 = model_time(params);
    params.algo = Algo::tsqr;
    return qr2 - model_time(params);
  };
  return first_negative(gap, cap);
}

std::optional<std::uint64_t> crossover_n(std::uint64_t m, std::uint64_t p,
                                         const LevelProfile& tsqr_profile,
                                         const LevelProfile& qr2_profile, std::uint64_t cap) {
  auto gap = [&](std::uint64_t n) {
    ModelParams params{m, n, p, 0.0, 0.0, 0.0, false, Algo::qr2};
    const double qr2 = model_time(params, qr2_profile);
    params.algo = Algo::tsqr;
    return qr2 - model_time(params, tsqr_profile);
  };
  return first_negative(gap, cap);
}

std::vector<SpeedupPoint> speedup_curve(const Topology& topo, Algo algo,
                                        std::span<const std::uint64_t> ms,
                                        std::span<const std::uint64_t> ns,
                                        std::span<const std::size_t> sites,
                                        std::size_t domains_per_site, bool want_q) {
  const Topology base = domains_per_site == 0 ? topo : topo.with_domains_per_cluster(domains_per_site);
  const Topology one = base.first_sites(1);
  std::vector<SpeedupPoint> out;
  for (std::uint64_t m : ms) {
    for (std::uint64_t n : ns) {
      const double t1 = model_time_on(one, algo, m, n, want_q);
      for (std::size_t s : sites) {
        SpeedupPoint pt;
        pt.m = m;
        pt.n = n;
        pt.sites = s;
        pt.algo = algo;
        pt.time_one_site = t1;
        pt.time = model_time_on(base.first_sites(s), algo, m, n, want_q);
        pt.speedup = t1 / pt.time;
        out.push_back(pt);
      }
    }
  }
  return out;
}

}  // namespace gridqr
