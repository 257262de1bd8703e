#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "gridqr/error.hpp"
#include "gridqr/topology.hpp"

using namespace gridqr;

TEST(Grid5000Preset, MatchesMeasuredTable) {
  const Topology g = grid5000_topology();
  ASSERT_EQ(g.cluster_count(), 4u);
  EXPECT_EQ(g.cluster(0).name, "Orsay");
  EXPECT_EQ(g.cluster(1).name, "Toulouse");
  EXPECT_DOUBLE_EQ(g.latency(0, 1), 7.97e-3);
  EXPECT_DOUBLE_EQ(g.latency(1, 0), 7.97e-3);
  EXPECT_DOUBLE_EQ(g.latency(0, 0), 0.07e-3);
  EXPECT_DOUBLE_EQ(g.latency(1, 2), 9.03e-3);
  EXPECT_DOUBLE_EQ(g.bandwidth(0, 0), 890e6 / 8);
  EXPECT_DOUBLE_EQ(g.bandwidth(1, 2), 77e6 / 8);
  EXPECT_DOUBLE_EQ(g.bandwidth(0, 3), 102e6 / 8);
  EXPECT_EQ(g.domain_count(), 256u);
}

TEST(Groups, OnePerCluster) {
  const auto groups = groups_from_topology(uniform_topology(2, 2));
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0], (ProcessGroup{0, {0, 1}}));
  EXPECT_EQ(groups[1], (ProcessGroup{1, {2, 3}}));

  const auto single = groups_from_topology(uniform_topology(1, 5));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].members.size(), 5u);

  const auto grid = groups_from_topology(grid5000_topology());
  ASSERT_EQ(grid.size(), 4u);
  for (const auto& g : grid) EXPECT_EQ(g.members.size(), 64u);
}

TEST(Groups, PartitionTheDomains) {
  const Topology t = uniform_topology(3, 2).with_placement({2, 0, 1, 0, 2, 1});
  const auto groups = groups_from_topology(t);
  std::vector<int> seen(6, 0);
  for (const auto& g : groups) {
    for (std::size_t d : g.members) {
      ++seen[d];
      EXPECT_EQ(t.cluster_of(d), g.group_id);
    }
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(LoadTopology, MinimalSingleCluster) {
  const Topology t = load_topology("cluster only domains=4 latency=1e-4 bandwidth=1e9\n");
  EXPECT_EQ(t.cluster_count(), 1u);
  EXPECT_EQ(t.domain_count(), 4u);
  EXPECT_DOUBLE_EQ(t.cluster(0).flop_rate, 1.0);
}

TEST(LoadTopology, TwoClustersWithLinkAndComments) {
  const Topology t = load_topology(
      "# two sites\n"
      "cluster a domains=2 latency=1e-5 bandwidth=1e8 floprate=2e9\n"
      "cluster b domains=3 latency=2e-5 bandwidth=1e8   # trailing comment\n"
      "\n"
      "link a b latency=5e-3 bandwidth=1e7\n");
  EXPECT_EQ(t.domain_count(), 5u);
  EXPECT_DOUBLE_EQ(t.latency(0, 1), 5e-3);
  EXPECT_DOUBLE_EQ(t.latency(1, 0), 5e-3);
  EXPECT_DOUBLE_EQ(t.latency(1, 1), 2e-5);
  EXPECT_EQ(t.cluster_of(2), 1u);
  EXPECT_DOUBLE_EQ(t.cluster(0).flop_rate, 2e9);
}

namespace {

std::size_t error_line(const std::string& text) {
  try {
    load_topology(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected ConfigError";
  return 0;
}

}  // namespace

TEST(LoadTopology, NegativeLatencyRejected) {
  EXPECT_EQ(error_line("cluster a domains=1 latency=-1 bandwidth=1\n"), 1u);
  EXPECT_EQ(error_line("cluster a domains=1 latency=1 bandwidth=1\n"
                       "cluster b domains=1 latency=1 bandwidth=1\n"
                       "link a b latency=-0.5 bandwidth=1\n"),
            3u);
}

TEST(LoadTopology, AsymmetricLinkRejected) {
  EXPECT_EQ(error_line("cluster a domains=1 latency=1 bandwidth=1\n"
                       "cluster b domains=1 latency=1 bandwidth=1\n"
                       "link a b latency=1 bandwidth=1\n"
                       "link b a latency=2 bandwidth=1\n"),
            4u);
}

TEST(LoadTopology, ParseErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("\n\ncluster a domains=x latency=1 bandwidth=1\n"), 3u);
  EXPECT_EQ(error_line("cluster a domains=1 latency=1\n"), 1u);
  EXPECT_EQ(error_line("cluster a domains=1 latency=1 bandwidth=1 color=red\n"), 1u);
  EXPECT_EQ(error_line("switch s\n"), 1u);
  EXPECT_EQ(error_line("cluster a domains=1 latency=1 bandwidth=1\nlink a z latency=1 bandwidth=1\n"), 2u);
  EXPECT_EQ(error_line("cluster a domains=0 latency=1 bandwidth=1\n"), 1u);
  EXPECT_THROW(load_topology("# nothing\n"), ConfigError);
}

TEST(LoadTopology, MissingLinkRejected) {
  EXPECT_THROW(load_topology("cluster a domains=1 latency=1 bandwidth=1\n"
                             "cluster b domains=1 latency=1 bandwidth=1\n"),
               ConfigError);
}

TEST(ResolveTopology, PresetsAndFiles) {
  EXPECT_EQ(resolve_topology("grid5000").domain_count(), 256u);
  const Topology u = resolve_topology("uniform:3x5");
  EXPECT_EQ(u.cluster_count(), 3u);
  EXPECT_EQ(u.domain_count(), 15u);
  EXPECT_THROW(resolve_topology("uniform:3"), ConfigError);
  EXPECT_THROW(resolve_topology("/nonexistent/topology.txt"), ConfigError);

  const std::string path = ::testing::TempDir() + "gridqr_topo.txt";
  {
    std::ofstream out(path);
    out << "cluster x domains=2 latency=1e-4 bandwidth=1e9\n";
  }
  EXPECT_EQ(resolve_topology(path).domain_count(), 2u);
  std::remove(path.c_str());
}

TEST(Topology, SubsetsAndResizing) {
  const Topology g = grid5000_topology();
  const Topology two = g.first_sites(2);
  EXPECT_EQ(two.domain_count(), 128u);
  EXPECT_DOUBLE_EQ(two.latency(0, 1), 7.97e-3);
  EXPECT_THROW(g.first_sites(5), ConfigError);
  EXPECT_EQ(g.with_domains_per_cluster(8).domain_count(), 32u);
  EXPECT_THROW(uniform_topology(2, 2).with_placement({0, 0, 0, 1}), ConfigError);
}

TEST(Topology, InfiniteRatesMeanZeroCost) {
  std::vector<Cluster> cl{{"a", 2, 1.0, INFINITY, INFINITY}};
  const Topology t(cl, DenseMatrix(1, 1), DenseMatrix(1, 1));
  EXPECT_EQ(t.inverse_bandwidth(0, 1), 0.0);
  EXPECT_EQ(t.seconds_per_flop(0), 0.0);
}
