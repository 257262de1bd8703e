#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gridqr/gridqr.hpp"

namespace gridqr::cli {
namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

class Csv {
 public:
  Csv(const RunSpec& spec, const std::string& command, std::vector<std::string> header) {
    text_ << "# command=" << command << " seed=" << spec.seed << " topology=" << spec.topology
          << "\n";
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ << (i ? "," : "") << cells[i];
    text_ << "\n";
  }

  std::string str() const { return text_.str(); }

 private:
  std::ostringstream text_;
};

std::string u(std::uint64_t v) { return std::to_string(v); }

// CSV goes to --out when given, otherwise to stdout.
void emit_csv(const RunSpec& spec, const Csv& csv, std::ostream& out) {
  if (spec.out.empty()) {
    out << csv.str();
    return;
  }
  std::ofstream file(spec.out, std::ios::binary);
  if (!file) throw UsageError("cannot open '" + spec.out + "' for writing");
  file << csv.str();
  if (!file) throw UsageError("failed writing '" + spec.out + "'");
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
  }
  return kUsageError;
}

Topology sites_of(const Topology& base, std::size_t sites) {
  if (sites == 0 || sites > base.cluster_count()) {
    throw UsageError("--sites " + std::to_string(sites) + " is outside 1.." +
                     std::to_string(base.cluster_count()) + " for this topology");
  }
  return base.first_sites(sites);
}

std::vector<std::size_t> default_sites(const RunSpec& spec, const Topology& base) {
  if (!spec.sites.empty()) return spec.sites;
  return {base.cluster_count()};
}

std::vector<Algo> algos_of(const RunSpec& spec) {
  std::vector<Algo> out;
  for (const auto& a : spec.algo) out.push_back(parse_algo(a));
  if (out.empty()) out.push_back(Algo::tsqr);
  return out;
}

// Processes per domain when a cluster of `procs` processes is cut into
// `domains` domains; 0 domains keeps one process per domain.
std::size_t procs_per_domain(const Topology& topo, std::size_t domains) {
  if (domains == 0) return 1;
  std::size_t ppd = 0;
  for (const Cluster& c : topo.clusters()) {
    if (domains > c.domain_count || c.domain_count % domains != 0) {
      throw UsageError("--domains " + std::to_string(domains) + " does not divide the " +
                       std::to_string(c.domain_count) + " processes of cluster " + c.name);
    }
    const std::size_t here = c.domain_count / domains;
    if (ppd != 0 && here != ppd) throw UsageError("--domains needs equal cluster sizes");
    ppd = here;
  }
  return ppd;
}

void check_desk_caps(const RunSpec& spec, std::uint64_t m, std::uint64_t n, bool with_q) {
  if (m > spec.max_m) {
    throw UsageError("m=" + u(m) + " exceeds the desk-scale cap --max-m=" + u(spec.max_m) +
                     "; raise the cap or use --counters-only");
  }
  if (n > spec.max_n) {
    throw UsageError("n=" + u(n) + " exceeds the cap --max-n=" + u(spec.max_n));
  }
  const double mb = double(m) * double(n) * 8.0 * (with_q ? 2.0 : 1.0) / (1024.0 * 1024.0);
  if (mb > double(spec.mem_cap_mb)) {
    throw UsageError("an " + u(m) + "x" + u(n) + " matrix needs " + fmt("%.0f", mb) +
                     " MB, over --mem-cap-mb=" + u(spec.mem_cap_mb) +
                     "; raise the cap or use --counters-only");
  }
}

void check_fits(std::uint64_t m, std::uint64_t n, std::uint64_t p) {
  if (n == 0 || m == 0) throw UsageError("m and n must be positive");
  if (m < p * n) {
    throw UsageError("m=" + u(m) + " is too short for " + u(p) + " domains of width " + u(n) +
                     " (need m >= P*n)");
  }
}

Json costs_json(const CostReport& c) {
  Json j;
  j["msgs"] = c.msg_count;
  j["inter_cluster_msgs"] = c.inter_cluster_msg_count;
  j["broadcast_msgs"] = c.broadcast_msg_count;
  j["volume_bytes"] = c.volume_bytes;
  j["inter_cluster_volume_bytes"] = c.inter_cluster_volume_bytes;
  j["critical_path_msgs"] = c.critical_path_msgs;
  j["critical_path_rounds"] = c.critical_path_rounds;
  j["critical_path_all_msgs"] = c.critical_path_all_msgs;
  j["critical_path_volume_bytes"] = c.critical_path_volume_bytes;
  j["flops_critical_path"] = c.flops_critical_path;
  j["flops_total"] = c.flops_total;
  j["time_s"] = c.modeled_time_seconds;
  return j;
}

// ---------------------------------------------------------------- verify

struct VerifyCase {
  std::size_t id = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t p = 1;
  std::size_t clusters = 1;
  TreeShape shape = TreeShape::binary;
};

struct VerifyResult {
  double backward = 0.0;
  double orthogonality = 0.0;
  double r_distance = 0.0;
  std::uint64_t msgs = 0;
  std::uint64_t inter_msgs = 0;
  std::vector<std::string> failures;
};

std::vector<VerifyCase> verify_corpus(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> rows(128, 4096);
  std::uniform_int_distribution<std::size_t> cols(1, 64);
  const std::size_t domain_choices[] = {1, 2, 4, 8};
  const TreeShape shapes[] = {TreeShape::flat, TreeShape::binary, TreeShape::hierarchical};
  std::vector<VerifyCase> out;
  for (std::size_t i = 0; i < count; ++i) {
    VerifyCase c;
    c.id = i;
    c.m = rows(rng);
    c.n = cols(rng);
    c.p = domain_choices[rng() % 4];
    c.n = std::min(c.n, c.m / c.p);
    c.clusters = (c.p >= 2 && i % 2 == 1) ? 2 : 1;
    c.shape = shapes[i % 3];
    out.push_back(c);
  }
  return out;
}

VerifyResult verify_one(const VerifyCase& c, std::uint64_t seed, bool fault) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const Topology topo = uniform_topology(c.clusters, c.p / c.clusters);
  const DenseMatrix a = gaussian_matrix(c.m, c.n, seed + c.id);
  Communicator comm(topo);
  TsqrFactorization f = tsqr_factor(a, build_tree(topo, c.shape), comm);
  if (fault) {
    for (double& t : f.leaf_factors[0].tau) {
      if (t != 0.0) {
        t = -t;
        break;
      }
    }
  }
  const DenseMatrix q = reconstruct_q(f);
  const DenseMatrix dense = sign_normalize(householder_qr(a)).r;

  VerifyResult r;
  r.backward = relative_distance(multiply(q, f.r), a);
  r.orthogonality =
      frobenius_norm(subtract(multiply_transposed(q, q), DenseMatrix::identity(c.n, c.n)));
  r.r_distance = relative_distance(f.r, dense);
  const CostReport costs = comm.report();
  r.msgs = costs.msg_count;
  r.inter_msgs = costs.inter_cluster_msg_count;

  const double dm = double(c.m);
  const double dn = double(c.n);
  if (!(r.backward <= 100 * eps * std::sqrt(dm * dn))) r.failures.push_back("backward_error");
  if (!(r.orthogonality <= 100 * eps * dn)) r.failures.push_back("orthogonality");
  if (!(r.r_distance <= 1e-10)) r.failures.push_back("r_vs_dense");
  if (r.msgs != c.p - 1) r.failures.push_back("message_count");
  if (c.shape == TreeShape::hierarchical && r.inter_msgs != c.clusters - 1) {
    r.failures.push_back("inter_cluster_count");
  }
  return r;
}

int verify_impl(const RunSpec& spec, std::ostream& out) {
  if (!spec.inject_fault.empty() && spec.inject_fault != "tau-sign") {
    throw UsageError("unknown fault '" + spec.inject_fault + "'");
  }
  const bool fault = spec.inject_fault == "tau-sign";
  const auto corpus = verify_corpus(spec.seed, spec.cases);

  Json report;
  report["seed"] = spec.seed;
  report["cases"] = Json::array();
  std::size_t failed = 0;
  std::ostringstream human;
  human << "seed=" << spec.seed << " cases=" << corpus.size()
        << (fault ? " fault=tau-sign" : "") << "\n";
  human << "case      m    n  P  C  tree    backward   orthogonality  r_distance  result\n";
  for (const VerifyCase& c : corpus) {
    const VerifyResult r = verify_one(c, spec.seed, fault);
    const bool ok = r.failures.empty();
    failed += ok ? 0 : 1;

    Json j;
    j["id"] = c.id;
    j["m"] = c.m;
    j["n"] = c.n;
    j["p"] = c.p;
    j["clusters"] = c.clusters;
    j["tree"] = to_string(c.shape);
    j["backward_error"] = r.backward;
    j["orthogonality"] = r.orthogonality;
    j["r_distance"] = r.r_distance;
    j["msgs"] = r.msgs;
    j["inter_cluster_msgs"] = r.inter_msgs;
    j["pass"] = ok;
    j["failures"] = r.failures;
    report["cases"].push_back(j);

    char line[160];
    std::snprintf(line, sizeof line, "%4zu %6zu %4zu %2zu %2zu  %-6s  %9.2e  %13.2e  %10.2e  %s",
                  c.id, c.m, c.n, c.p, c.clusters, to_string(c.shape).c_str(), r.backward,
                  r.orthogonality, r.r_distance, ok ? "ok" : "FAIL");
    human << line;
    for (const auto& what : r.failures) human << " " << what;
    human << "\n";
  }
  report["passed"] = corpus.size() - failed;
  report["failed"] = failed;

  if (spec.json) {
    out << report.dump(2) << "\n";
  } else {
    out << human.str() << (corpus.size() - failed) << "/" << corpus.size() << " cases passed\n";
  }
  return failed == 0 ? kOk : kPropertyFailure;
}

// ---------------------------------------------------------------- bench

struct BenchPoint {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  std::size_t sites = 0;
  std::size_t domains = 0;  // per cluster, 0 = one per process
  Algo algo = Algo::tsqr;
};

struct BenchRow {
  std::size_t p = 0;
  std::size_t ppd = 1;
  CostReport costs;
};

BenchRow bench_one(const RunSpec& spec, const Topology& base, TreeShape shape, const BenchPoint& pt) {
  const Topology topo = sites_of(base, pt.sites);
  BenchRow row;
  row.p = topo.domain_count();
  row.ppd = pt.algo == Algo::tsqr ? procs_per_domain(topo, pt.domains) : 1;
  Communicator comm(topo);
  if (pt.algo == Algo::tsqr) {
    const ReductionTree tree = build_tree(topo, shape, row.ppd);
    if (spec.counters_only) {
      simulate_tsqr(pt.m, pt.n, tree, comm, spec.want_q);
    } else {
      const TsqrFactorization f = tsqr_factor(gaussian_matrix(pt.m, pt.n, spec.seed), tree, comm);
      if (spec.want_q) reconstruct_q(f, &comm);
    }
  } else {
    const ReductionTree tree = build_tree(topo, TreeShape::binary);
    if (spec.counters_only) {
      simulate_qr2(pt.m, pt.n, tree, comm);
    } else {
      qr2_factor(gaussian_matrix(pt.m, pt.n, spec.seed), tree, comm);
    }
  }
  row.costs = comm.report();
  return row;
}

int bench_impl(const RunSpec& spec, std::ostream& out) {
  const Topology base = resolve_topology(spec.topology);
  const TreeShape shape = parse_tree_shape(spec.tree);
  const auto algos = algos_of(spec);
  if (spec.want_q && std::find(algos.begin(), algos.end(), Algo::qr2) != algos.end()) {
    throw UsageError("--want-q is only simulated for tsqr");
  }
  const std::vector<std::uint64_t> ms = spec.m.empty() ? std::vector<std::uint64_t>{131072} : spec.m;
  const std::vector<std::uint64_t> ns = spec.n.empty() ? std::vector<std::uint64_t>{64} : spec.n;
  const auto sites = default_sites(spec, base);
  const std::vector<std::size_t> domains = spec.domains.empty() ? std::vector<std::size_t>{0} : spec.domains;

  std::vector<BenchPoint> points;
  for (std::uint64_t m : ms) {
    for (std::uint64_t n : ns) {
      for (std::size_t s : sites) {
        for (std::size_t d : domains) {
          for (Algo a : algos) points.push_back({m, n, s, d, a});
        }
      }
    }
  }

  // Refuse the whole grid up front rather than part-way through.
  for (const BenchPoint& pt : points) {
    const Topology topo = sites_of(base, pt.sites);
    const std::uint64_t p = topo.domain_count();
    if (p > spec.max_p) throw UsageError("P=" + u(p) + " exceeds the cap --max-p=" + u(spec.max_p));
    if (pt.algo == Algo::tsqr) procs_per_domain(topo, pt.domains);
    check_fits(pt.m, pt.n, p);
    if (!spec.counters_only) check_desk_caps(spec, pt.m, pt.n, spec.want_q);
  }

  std::vector<BenchRow> rows(points.size());
  const std::size_t workers = std::clamp<std::size_t>(spec.jobs, 1, std::max<std::size_t>(1, points.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      rows[i] = bench_one(spec, base, shape, points[i]);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  const std::vector<std::string> header = {
      "m", "n", "sites", "domains", "p", "algo", "tree", "wantQ", "mode", "msgs", "inter_cluster_msgs",
      "broadcast_msgs", "volume_bytes", "critical_path_msgs", "critical_path_rounds",
      "critical_path_volume_bytes", "flops_critical_path", "flops_total", "time_s"};
  Csv csv(spec, "bench", header);
  Json rows_json = Json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const BenchPoint& pt = points[i];
    const BenchRow& r = rows[i];
    const CostReport& c = r.costs;
    const std::string tree = pt.algo == Algo::tsqr ? to_string(shape) : "binary";
    const std::size_t doms = r.p / r.ppd / pt.sites;
    csv.row({u(pt.m), u(pt.n), u(pt.sites), u(pt.algo == Algo::tsqr ? doms : r.p / pt.sites), u(r.p),
             to_string(pt.algo), tree, spec.want_q ? "1" : "0",
             spec.counters_only ? "counters" : "numeric", u(c.msg_count),
             u(c.inter_cluster_msg_count), u(c.broadcast_msg_count), u(c.volume_bytes),
             u(c.critical_path_msgs), u(c.critical_path_rounds), u(c.critical_path_volume_bytes),
             format_double(c.flops_critical_path), format_double(c.flops_total),
             format_double(c.modeled_time_seconds)});
    Json j;
    j["m"] = pt.m;
    j["n"] = pt.n;
    j["sites"] = pt.sites;
    j["p"] = r.p;
    j["procs_per_domain"] = r.ppd;
    j["algo"] = to_string(pt.algo);
    j["tree"] = tree;
    j["costs"] = costs_json(c);
    rows_json.push_back(j);
  }

  if (spec.json) {
    Json doc;
    doc["seed"] = spec.seed;
    doc["topology"] = spec.topology;
    doc["rows"] = rows_json;
    out << doc.dump(2) << "\n";
    if (!spec.out.empty()) emit_csv(spec, csv, out);
  } else {
    emit_csv(spec, csv, out);
  }
  return kOk;
}

// ---------------------------------------------------------------- model

int model_impl(const RunSpec& spec, std::ostream& out) {
  const Topology base = resolve_topology(spec.topology);
  const auto algos = algos_of(spec);
  const std::vector<std::uint64_t> ms = spec.m.empty() ? std::vector<std::uint64_t>{33554432} : spec.m;
  const std::vector<std::uint64_t> ns = spec.n.empty() ? std::vector<std::uint64_t>{64} : spec.n;
  const std::vector<std::size_t> domains = spec.domains.empty() ? std::vector<std::size_t>{0} : spec.domains;
  auto resize = [&](std::size_t d) { return d == 0 ? base : base.with_domains_per_cluster(d); };

  if (spec.report == "table") {
    Csv csv(spec, "model", {"m", "n", "p", "sites", "algo", "wantQ", "msgs", "volume_bytes", "flops", "time_s"});
    for (std::uint64_t m : ms) {
      for (std::uint64_t n : ns) {
        for (std::size_t d : domains) {
          for (std::size_t s : default_sites(spec, base)) {
            const Topology topo = sites_of(resize(d), s);
            const std::uint64_t p = topo.domain_count();
            for (Algo a : algos) {
              ModelParams params{m, n, p, 0.0, 0.0, 0.0, spec.want_q, a};
              const ModelCounts c = model_counts(params);
              const double t = model_time_on(topo, a, m, n, spec.want_q);
              csv.row({u(m), u(n), u(p), u(s), to_string(a), spec.want_q ? "1" : "0",
                       format_double(c.msgs), format_double(8.0 * c.volume), format_double(c.flops),
                       format_double(t)});
            }
          }
        }
      }
    }
    emit_csv(spec, csv, out);
    return kOk;
  }

  if (spec.report == "crossover") {
    Csv csv(spec, "model-crossover", {"m", "p", "sites", "n_star"});
    for (std::uint64_t m : ms) {
      for (std::size_t d : domains) {
        for (std::size_t s : default_sites(spec, base)) {
          const Topology topo = sites_of(resize(d), s);
          const LevelProfile t = level_profile(topo, build_tree(topo, TreeShape::hierarchical));
          const LevelProfile q = level_profile(topo, build_tree(topo, TreeShape::binary));
          const auto n_star = crossover_n(m, topo.domain_count(), t, q);
          csv.row({u(m), u(topo.domain_count()), u(s), n_star ? u(*n_star) : "none"});
        }
      }
    }
    emit_csv(spec, csv, out);
    return kOk;
  }

  if (spec.report == "speedup") {
    std::vector<std::size_t> sites = spec.sites;
    if (sites.empty()) {
      for (std::size_t s = 1; s <= base.cluster_count(); ++s) sites.push_back(s);
    }
    for (std::size_t s : sites) sites_of(base, s);
    Csv csv(spec, "model-speedup",
            {"m", "n", "domains", "sites", "algo", "wantQ", "time_one_site_s", "time_s", "speedup"});
    for (std::size_t d : domains) {
      for (Algo a : algos) {
        for (const SpeedupPoint& pt : speedup_curve(base, a, ms, ns, sites, d, spec.want_q)) {
          csv.row({u(pt.m), u(pt.n), u(d == 0 ? base.cluster(0).domain_count : d), u(pt.sites),
                   to_string(a), spec.want_q ? "1" : "0", format_double(pt.time_one_site),
                   format_double(pt.time), format_double(pt.speedup)});
        }
      }
    }
    emit_csv(spec, csv, out);
    return kOk;
  }
  throw UsageError("unknown --report '" + spec.report + "' (table, crossover, speedup)");
}

// ---------------------------------------------------------------- compare

int compare_impl(const RunSpec& spec, std::ostream& out) {
  const Topology base = resolve_topology(spec.topology);
  const std::uint64_t m = spec.m.empty() ? 65536 : spec.m.front();
  const std::uint64_t n = spec.n.empty() ? 32 : spec.n.front();
  const Topology topo = sites_of(base, default_sites(spec, base).front());
  const std::size_t d = spec.domains.empty() ? 0 : spec.domains.front();
  if (topo.domain_count() > spec.max_p) {
    throw UsageError("P=" + u(topo.domain_count()) + " exceeds the cap --max-p=" + u(spec.max_p));
  }
  check_fits(m, n, topo.domain_count());
  check_desk_caps(spec, m, n, false);

  CompareParams params;
  params.tsqr_shape = parse_tree_shape(spec.tree);
  params.procs_per_domain = procs_per_domain(topo, d);
  const Comparison c = compare_runs(gaussian_matrix(m, n, spec.seed), topo, params);

  if (!spec.out.empty()) {
    Csv csv(spec, "compare",
            {"m", "n", "p", "algo", "msgs", "broadcast_msgs", "critical_path_rounds", "critical_path_msgs",
             "critical_path_all_msgs", "volume_bytes", "time_s", "message_ratio", "time_ratio", "r_distance"});
    for (const auto& [name, r] : {std::pair{"tsqr", c.tsqr}, std::pair{"qr2", c.qr2}}) {
      csv.row({u(m), u(n), u(topo.domain_count()), name, u(r.msg_count), u(r.broadcast_msg_count),
               u(r.critical_path_rounds), u(r.critical_path_msgs), u(r.critical_path_all_msgs),
               u(r.volume_bytes), format_double(r.modeled_time_seconds), format_double(c.message_ratio),
               format_double(c.time_ratio), format_double(c.r_distance)});
    }
    emit_csv(spec, csv, out);
  }

  if (spec.json) {
    Json j;
    j["seed"] = spec.seed;
    j["m"] = m;
    j["n"] = n;
    j["p"] = topo.domain_count();
    j["tsqr"] = costs_json(c.tsqr);
    j["qr2"] = costs_json(c.qr2);
    j["message_ratio"] = c.message_ratio;
    j["time_ratio"] = c.time_ratio;
    j["r_distance"] = c.r_distance;
    out << j.dump(2) << "\n";
  } else if (spec.out.empty()) {
    auto line = [&](const char* name, const CostReport& r) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "%-5s msgs=%llu (broadcast %llu, inter-cluster %llu)  rounds=%llu  "
                    "volume=%llu B  time=%.6g s\n",
                    name, static_cast<unsigned long long>(r.msg_count),
                    static_cast<unsigned long long>(r.broadcast_msg_count),
                    static_cast<unsigned long long>(r.inter_cluster_msg_count),
                    static_cast<unsigned long long>(r.critical_path_rounds),
                    static_cast<unsigned long long>(r.volume_bytes), r.modeled_time_seconds);
      out << buf;
    };
    out << "m=" << m << " n=" << n << " P=" << topo.domain_count() << " seed=" << spec.seed << "\n";
    line("tsqr", c.tsqr);
    line("qr2", c.qr2);
    out << "reduce rounds qr2/tsqr: " << fmt("%.6g", c.message_ratio) << "\n"
        << "modeled time qr2/tsqr:  " << fmt("%.6g", c.time_ratio) << "\n"
        << "R distance:             " << fmt("%.3e", c.r_distance) << "\n";
  }
  return kOk;
}

void add_common(CLI::App* sc, RunSpec& spec) {
  sc->add_option("--m", spec.m, "Row counts (comma list)")->delimiter(',');
  sc->add_option("--n", spec.n, "Column counts (comma list)")->delimiter(',');
  sc->add_option("--sites", spec.sites, "Number of sites taken from the topology (comma list)")
      ->delimiter(',');
  sc->add_option("--domains", spec.domains, "Domains per site (comma list)")->delimiter(',');
  sc->add_option("--tree", spec.tree, "TSQR reduction tree")
      ->check(CLI::IsMember({"flat", "binary", "hier", "hierarchical"}));
  sc->add_option("--algo", spec.algo, "Algorithms (comma list)")
      ->delimiter(',')
      ->check(CLI::IsMember({"tsqr", "qr2"}));
  sc->add_flag("--want-q", spec.want_q, "Also form Q");
  sc->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  sc->add_option("--topology", spec.topology, "grid5000, uniform:<C>x<D> or a topology file")
      ->capture_default_str();
  sc->add_option("--out", spec.out, "Write CSV to this path");
  sc->add_flag("--json", spec.json, "JSON output");
  sc->add_option("--jobs", spec.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void add_caps(CLI::App* sc, RunSpec& spec) {
  sc->add_option("--max-m", spec.max_m, "Row cap for numeric runs")->capture_default_str();
  sc->add_option("--max-n", spec.max_n, "Column cap for numeric runs")->capture_default_str();
  sc->add_option("--max-p", spec.max_p, "Domain cap")->capture_default_str();
  sc->add_option("--mem-cap-mb", spec.mem_cap_mb, "Matrix memory cap in MB")->capture_default_str();
}

}  // namespace

std::string format_double(double v) { return fmt("%.17g", v); }

int cmd_verify(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return verify_impl(spec, out); });
}

int cmd_bench(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return bench_impl(spec, out); });
}

int cmd_model(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return model_impl(spec, out); });
}

int cmd_compare(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return compare_impl(spec, out); });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tall-skinny QR on simulated clusters of clusters", "gridqr"};
  app.require_subcommand(1);
  RunSpec spec;

  auto* verify = app.add_subcommand("verify", "Run the numerical property suite on a seeded corpus");
  add_common(verify, spec);
  verify->add_option("--cases", spec.cases, "Corpus size")->capture_default_str();
  verify->add_option("--inject-fault", spec.inject_fault)->group("");

  auto* bench = app.add_subcommand("bench", "Simulated runs over a parameter grid, CSV out");
  add_common(bench, spec);
  add_caps(bench, spec);
  bench->add_flag("--counters-only", spec.counters_only, "Simulate without matrix data");

  auto* model = app.add_subcommand("model", "Closed-form cost model tables");
  add_common(model, spec);
  model->add_option("--report", spec.report, "table, crossover or speedup")
      ->check(CLI::IsMember({"table", "crossover", "speedup"}))
      ->capture_default_str();

  auto* compare = app.add_subcommand("compare", "TSQR against the column-by-column baseline");
  add_common(compare, spec);
  add_caps(compare, spec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  if (verify->parsed()) return cmd_verify(spec, out, err);
  if (bench->parsed()) return cmd_bench(spec, out, err);
  if (model->parsed()) return cmd_model(spec, out, err);
  return cmd_compare(spec, out, err);
}

}  // namespace gridqr::cli
