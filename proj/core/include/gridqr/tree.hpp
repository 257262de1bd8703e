#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "gridqr/topology.hpp"

namespace gridqr {

enum class TreeShape { flat, binary, hierarchical };

TreeShape parse_tree_shape(std::string_view name);  // flat | binary | hier | hierarchical
std::string to_string(TreeShape shape);

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

/// Leaves carry a domain id; merge nodes carry two children.
///
/// A merge node is owned by the owner of its left child, so the only message
/// a merge needs is the right child's R going to the left child's owner.
/// That transfer is the tree "edge" counted by the edge functions below.
struct TreeNode {
  std::size_t left = kNoNode;
  std::size_t right = kNoNode;
  std::size_t domain = kNoNode;  // leaves only
  std::size_t owner = 0;         // domain holding this node's R
  std::size_t cluster = 0;       // cluster of `owner`
  std::size_t level = 0;         // 0 for leaves, 1 + max(child levels) otherwise

  bool is_leaf() const noexcept { return left == kNoNode; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Nodes 0..P-1 are the leaves in domain order; merge nodes follow in the
/// order they are executed, so children always precede parents.
struct ReductionTree {
  std::vector<TreeNode> nodes;
  std::size_t root = kNoNode;
  std::size_t leaf_count = 0;

  std::size_t merge_count() const noexcept { return nodes.size() - leaf_count; }
  const TreeNode& node(std::size_t id) const { return nodes.at(id); }
  /// Cluster of the right child's owner, i.e. the sending side of the merge edge.
  std::size_t sender_cluster(std::size_t merge_id) const;
  bool is_inter_cluster(std::size_t merge_id) const;

  friend bool operator==(const ReductionTree&, const ReductionTree&) = default;
};

/// Build a reduction tree over the topology's domains.
///
/// binary: adjacent domains in ascending id are paired each round; an odd one
/// out is promoted unpaired. flat: left-deep chain in ascending id.
/// hierarchical: binary within each cluster, then binary over the cluster
/// roots in ascending cluster index.
///
/// procs_per_domain > 1 first groups each cluster's domains into runs of that
/// many processes reduced by a flat chain (a domain factored by a process
/// group); the chosen shape then runs over the group leaders.
ReductionTree build_tree(const Topology& topo, TreeShape shape, std::size_t procs_per_domain = 1);

std::size_t inter_cluster_edges(const ReductionTree& tree);
std::size_t intra_cluster_edges(const ReductionTree& tree);

/// Largest number of merge edges on any leaf-to-root path.
std::size_t message_depth(const ReductionTree& tree);

}  // namespace gridqr
