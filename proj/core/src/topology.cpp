#include "gridqr/topology.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "gridqr/error.hpp"

namespace gridqr {
namespace {

void check_square(const DenseMatrix& t, std::size_t c, const char* what) {
  if (t.rows() != c || t.cols() != c) {
    throw ConfigError(std::string(what) + " table must be " + std::to_string(c) + "x" +
                      std::to_string(c));
  }
}

// 890 Mb/s in bytes per second.
constexpr double kGigabitEthernet = 890e6 / 8.0;
// 235 Gflop/s practical bound of a 64-processor site.
constexpr double kDomainFlopRate = 940e9 / 256.0;

}  // namespace

Topology::Topology(std::vector<Cluster> clusters, DenseMatrix latency, DenseMatrix bandwidth)
    : clusters_(std::move(clusters)), latency_(std::move(latency)), bandwidth_(std::move(bandwidth)) {
  const std::size_t c = clusters_.size();
  if (c == 0) throw ConfigError("topology needs at least one cluster");
  check_square(latency_, c, "latency");
  check_square(bandwidth_, c, "bandwidth");
  for (std::size_t a = 0; a < c; ++a) {
    const Cluster& cl = clusters_[a];
    if (cl.domain_count == 0) throw ConfigError("cluster " + cl.name + " has no domains");
    if (!(cl.flop_rate > 0.0)) throw ConfigError("cluster " + cl.name + ": floprate must be > 0");
    latency_(a, a) = cl.latency;
    bandwidth_(a, a) = cl.bandwidth;
    for (std::size_t d = 0; d < cl.domain_count; ++d) placement_.push_back(a);
  }
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = 0; b < c; ++b) {
      const double lat = latency_(a, b);
      const double bw = bandwidth_(a, b);
      if (!std::isfinite(lat) || lat < 0.0) {
        throw ConfigError("latency between clusters " + std::to_string(a) + " and " +
                          std::to_string(b) + " must be finite and >= 0");
      }
      if (!(bw > 0.0)) {
        throw ConfigError("bandwidth between clusters " + std::to_string(a) + " and " +
                          std::to_string(b) + " must be > 0");
      }
      if (lat != latency_(b, a) || bw != bandwidth_(b, a)) {
        throw ConfigError("latency/bandwidth tables must be symmetric");
      }
    }
  }
}

double Topology::inverse_bandwidth(std::size_t domain_a, std::size_t domain_b) const {
  return 1.0 / bandwidth_(cluster_of(domain_a), cluster_of(domain_b));
}

double Topology::link_latency(std::size_t domain_a, std::size_t domain_b) const {
  return latency_(cluster_of(domain_a), cluster_of(domain_b));
}

double Topology::seconds_per_flop(std::size_t domain) const {
  return 1.0 / clusters_[cluster_of(domain)].flop_rate;
}

Topology Topology::with_placement(std::vector<std::size_t> placement) const {
  std::vector<std::size_t> counts(clusters_.size(), 0);
  for (std::size_t c : placement) {
    if (c >= clusters_.size()) throw ConfigError("placement names an unknown cluster");
    ++counts[c];
  }
  for (std::size_t c = 0; c < clusters_.size(); ++c) {
    if (counts[c] != clusters_[c].domain_count) {
      throw ConfigError("placement gives cluster " + clusters_[c].name + " " +
                        std::to_string(counts[c]) + " domains, expected " +
                        std::to_string(clusters_[c].domain_count));
    }
  }
  Topology out = *this;
  out.placement_ = std::move(placement);
  return out;
}

Topology Topology::first_sites(std::size_t sites) const {
  if (sites == 0 || sites > clusters_.size()) {
    throw ConfigError("requested " + std::to_string(sites) + " sites, topology has " +
                      std::to_string(clusters_.size()));
  }
  std::vector<Cluster> cl(clusters_.begin(), clusters_.begin() + static_cast<std::ptrdiff_t>(sites));
  return Topology(std::move(cl), latency_.block(0, 0, sites, sites),
                  bandwidth_.block(0, 0, sites, sites));
}

Topology Topology::with_domains_per_cluster(std::size_t domains) const {
  std::vector<Cluster> cl = clusters_;
  for (Cluster& c : cl) c.domain_count = domains;
  return Topology(std::move(cl), latency_, bandwidth_);
}

std::vector<ProcessGroup> groups_from_topology(const Topology& topo) {
  std::vector<ProcessGroup> groups(topo.cluster_count());
  for (std::size_t c = 0; c < groups.size(); ++c) groups[c].group_id = c;
  for (std::size_t d = 0; d < topo.domain_count(); ++d) {
    groups[topo.cluster_of(d)].members.push_back(d);
  }
  return groups;
}

Topology grid5000_topology() {
  const char* names[] = {"Orsay", "Toulouse", "Bordeaux", "Sophia"};
  const double intra_ms[] = {0.07, 0.03, 0.05, 0.06};
  // Upper triangles of the measured tables, ms and Mb/s.
  const double lat_ms[4][4] = {
      {0.07, 7.97, 6.98, 6.12}, {0, 0.03, 9.03, 8.18}, {0, 0, 0.05, 7.18}, {0, 0, 0, 0.06}};
  const double mbps[4][4] = {
      {890, 78, 90, 102}, {0, 890, 77, 90}, {0, 0, 890, 83}, {0, 0, 0, 890}};

  std::vector<Cluster> clusters;
  for (std::size_t c = 0; c < 4; ++c) {
    clusters.push_back({names[c], 64, intra_ms[c] * 1e-3, kGigabitEthernet, kDomainFlopRate});
  }
  DenseMatrix lat(4, 4);
  DenseMatrix bw(4, 4);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a; b < 4; ++b) {
      lat(a, b) = lat(b, a) = lat_ms[a][b] * 1e-3;
      bw(a, b) = bw(b, a) = mbps[a][b] * 1e6 / 8.0;
    }
  }
  return Topology(std::move(clusters), std::move(lat), std::move(bw));
}

Topology uniform_topology(std::size_t clusters, std::size_t domains_per_cluster) {
  if (clusters == 0 || domains_per_cluster == 0) {
    throw ConfigError("uniform topology needs at least one cluster and one domain");
  }
  constexpr double kLatency = 5e-5;
  std::vector<Cluster> cl;
  for (std::size_t c = 0; c < clusters; ++c) {
    cl.push_back({"site" + std::to_string(c), domains_per_cluster, kLatency, kGigabitEthernet,
                  kDomainFlopRate});
  }
  DenseMatrix lat(clusters, clusters);
  DenseMatrix bw(clusters, clusters);
  for (double& x : lat.data()) x = kLatency;
  for (double& x : bw.data()) x = kGigabitEthernet;
  return Topology(std::move(cl), std::move(lat), std::move(bw));
}

namespace {

double parse_number(const std::string& value, const std::string& key, std::size_t line) {
  if (value == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw ConfigError("bad number '" + value + "' for " + key, line);
  }
  return x;
}

std::size_t parse_count(const std::string& value, const std::string& key, std::size_t line) {
  std::size_t x = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("bad integer '" + value + "' for " + key, line);
  }
  return x;
}

struct LinkSpec {
  double latency;
  double bandwidth;
  std::size_t line;
};

std::map<std::string, std::string> parse_keys(std::istringstream& in, std::size_t line) {
  std::map<std::string, std::string> keys;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("expected key=value, got '" + tok + "'", line);
    }
    if (!keys.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second) {
      throw ConfigError("duplicate key '" + tok.substr(0, eq) + "'", line);
    }
  }
  return keys;
}

std::string take(std::map<std::string, std::string>& keys, const std::string& key,
                 std::size_t line) {
  auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError("missing " + key + "=", line);
  std::string v = it->second;
  keys.erase(it);
  return v;
}

void reject_leftovers(const std::map<std::string, std::string>& keys, std::size_t line) {
  if (!keys.empty()) throw ConfigError("unknown key '" + keys.begin()->first + "'", line);
}

void check_link_values(double latency, double bandwidth, std::size_t line) {
  if (!(latency >= 0.0) || !std::isfinite(latency)) {
    throw ConfigError("latency must be finite and >= 0", line);
  }
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be > 0", line);
}

}  // namespace

Topology load_topology(std::string_view text) {
  std::vector<Cluster> clusters;
  std::map<std::string, std::size_t> index;
  std::map<std::pair<std::size_t, std::size_t>, LinkSpec> links;

  std::istringstream all{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(all, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream in(raw);
    std::string kind;
    if (!(in >> kind)) continue;

    if (kind == "cluster") {
      std::string name;
      if (!(in >> name) || name.find('=') != std::string::npos) {
        throw ConfigError("cluster line needs a name", line_no);
      }
      if (index.count(name) != 0) throw ConfigError("duplicate cluster '" + name + "'", line_no);
      auto keys = parse_keys(in, line_no);
      Cluster c;
      c.name = name;
      c.domain_count = parse_count(take(keys, "domains", line_no), "domains", line_no);
      c.latency = parse_number(take(keys, "latency", line_no), "latency", line_no);
      c.bandwidth = parse_number(take(keys, "bandwidth", line_no), "bandwidth", line_no);
      if (keys.count("floprate") != 0) {
        c.flop_rate = parse_number(take(keys, "floprate", line_no), "floprate", line_no);
      }
      reject_leftovers(keys, line_no);
      if (c.domain_count == 0) throw ConfigError("domains must be >= 1", line_no);
      check_link_values(c.latency, c.bandwidth, line_no);
      if (!(c.flop_rate > 0.0)) throw ConfigError("floprate must be > 0", line_no);
      index.emplace(name, clusters.size());
      clusters.push_back(std::move(c));
    } else if (kind == "link") {
      std::string a;
      std::string b;
      if (!(in >> a >> b)) throw ConfigError("link line needs two cluster names", line_no);
      auto ia = index.find(a);
      auto ib = index.find(b);
      if (ia == index.end()) throw ConfigError("unknown cluster '" + a + "'", line_no);
      if (ib == index.end()) throw ConfigError("unknown cluster '" + b + "'", line_no);
      if (ia->second == ib->second) {
        throw ConfigError("link must join two distinct clusters", line_no);
      }
      auto keys = parse_keys(in, line_no);
      LinkSpec spec{parse_number(take(keys, "latency", line_no), "latency", line_no),
                    parse_number(take(keys, "bandwidth", line_no), "bandwidth", line_no), line_no};
      reject_leftovers(keys, line_no);
      check_link_values(spec.latency, spec.bandwidth, line_no);

      const auto key = std::make_pair(ia->second, ib->second);
      const auto rev = std::make_pair(ib->second, ia->second);
      if (auto it = links.find(rev); it != links.end()) {
        if (it->second.latency != spec.latency || it->second.bandwidth != spec.bandwidth) {
          throw ConfigError("asymmetric link between '" + a + "' and '" + b + "'", line_no);
        }
      }
      if (auto it = links.find(key); it != links.end()) {
        throw ConfigError("duplicate link '" + a + "' -> '" + b + "'", line_no);
      }
      links.emplace(key, spec);
    } else {
      throw ConfigError("unknown directive '" + kind + "'", line_no);
    }
  }

  if (clusters.empty()) throw ConfigError("topology declares no clusters");
  const std::size_t c = clusters.size();
  DenseMatrix lat(c, c);
  DenseMatrix bw(c, c);
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = 0; b < c; ++b) {
      if (a == b) continue;
      auto it = links.find({a, b});
      if (it == links.end()) it = links.find({b, a});
      if (it == links.end()) {
        throw ConfigError("missing link between '" + clusters[a].name + "' and '" +
                          clusters[b].name + "'");
      }
      lat(a, b) = it->second.latency;
      bw(a, b) = it->second.bandwidth;
    }
  }
  return Topology(std::move(clusters), std::move(lat), std::move(bw));
}

Topology resolve_topology(const std::string& source) {
  if (source == "grid5000") return grid5000_topology();
  constexpr std::string_view kUniform = "uniform:";
  if (source.rfind(kUniform, 0) == 0) {
    const std::string dims = source.substr(kUniform.size());
    const auto x = dims.find('x');
    if (x == std::string::npos) throw ConfigError("uniform preset must look like uniform:<C>x<D>");
    const std::size_t c = parse_count(dims.substr(0, x), "uniform clusters", 0);
    const std::size_t d = parse_count(dims.substr(x + 1), "uniform domains", 0);
    return uniform_topology(c, d);
  }
  std::ifstream file(source);
  if (!file) throw ConfigError("cannot open topology file '" + source + "'");
  std::stringstream buf;
  buf << file.rdbuf();
  return load_topology(buf.str());
}

}  // namespace gridqr
