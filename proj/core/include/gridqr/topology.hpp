#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gridqr/matrix.hpp"

namespace gridqr {

/// One site of a cluster-of-clusters grid.
struct Cluster {
  std::string name;
  std::size_t domain_count = 1;
  double latency = 0.0;    // s, between two domains of this cluster
  double bandwidth = 0.0;  // bytes/s, between two domains of this cluster
  double flop_rate = 1.0;  // flops/s of a single domain
};

/// Domains are numbered 0..P-1. By default cluster c owns a contiguous block
/// of ids; with_placement() can assign them arbitrarily.
///
/// latency(a, b) / bandwidth(a, b) are symmetric C x C tables whose diagonal
/// holds the intra-cluster values. Bandwidth and flop rate may be +inf,
/// meaning a zero bandwidth or flop term in the cost model.
class Topology {
 public:
  Topology(std::vector<Cluster> clusters, DenseMatrix latency, DenseMatrix bandwidth);

  std::size_t cluster_count() const noexcept { return clusters_.size(); }
  std::size_t domain_count() const noexcept { return placement_.size(); }

  const std::vector<Cluster>& clusters() const noexcept { return clusters_; }
  const Cluster& cluster(std::size_t c) const { return clusters_.at(c); }

  double latency(std::size_t ca, std::size_t cb) const { return latency_(ca, cb); }
  double bandwidth(std::size_t ca, std::size_t cb) const { return bandwidth_(ca, cb); }
  const DenseMatrix& latency_table() const noexcept { return latency_; }
  const DenseMatrix& bandwidth_table() const noexcept { return bandwidth_; }

  std::size_t cluster_of(std::size_t domain) const { return placement_.at(domain); }
  const std::vector<std::size_t>& placement() const noexcept { return placement_; }

  /// Seconds per byte between two domains (0 for infinite bandwidth).
  double inverse_bandwidth(std::size_t domain_a, std::size_t domain_b) const;
  double link_latency(std::size_t domain_a, std::size_t domain_b) const;
  /// Seconds per flop on a domain (0 for an infinite rate).
  double seconds_per_flop(std::size_t domain) const;

  /// Same clusters and links; placement[d] is the cluster of domain d. Each
  /// cluster must receive exactly its domain_count domains.
  Topology with_placement(std::vector<std::size_t> placement) const;

  /// The first `sites` clusters with their links.
  Topology first_sites(std::size_t sites) const;

  /// Every cluster resized to `domains` domains, contiguous placement.
  Topology with_domains_per_cluster(std::size_t domains) const;

 private:
  std::vector<Cluster> clusters_;
  DenseMatrix latency_;
  DenseMatrix bandwidth_;
  std::vector<std::size_t> placement_;
};

/// A set of domains that share one cluster (one communicator per group).
struct ProcessGroup {
  std::size_t group_id = 0;
  std::vector<std::size_t> members;

  friend bool operator==(const ProcessGroup&, const ProcessGroup&) = default;
};

std::vector<ProcessGroup> groups_from_topology(const Topology& topo);

/// Orsay, Toulouse, Bordeaux, Sophia: 64 domains each (32 dual-processor
/// nodes), measured latency and throughput between the four sites.
Topology grid5000_topology();

/// C clusters of D domains on a homogeneous network.
Topology uniform_topology(std::size_t clusters, std::size_t domains_per_cluster);

/// Parse the line-oriented topology format:
///
///   # comment
///   cluster <name> domains=<k> latency=<s> bandwidth=<B/s> [floprate=<f/s>]
///   link <a> <b> latency=<s> bandwidth=<B/s>
///
/// Every pair of distinct clusters needs a link. Errors carry the line number.
Topology load_topology(std::string_view text);

/// "grid5000", "uniform:<C>x<D>", or a path to a topology file.
Topology resolve_topology(const std::string& source);

}  // namespace gridqr
