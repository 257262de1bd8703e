#include "gridqr/tree.hpp"

#include <algorithm>

#include "gridqr/error.hpp"

namespace gridqr {

TreeShape parse_tree_shape(std::string_view name) {
  if (name == "flat") return TreeShape::flat;
  if (name == "binary") return TreeShape::binary;
  if (name == "hier" || name == "hierarchical") return TreeShape::hierarchical;
  throw std::invalid_argument("unknown tree shape '" + std::string(name) + "'");
}

std::string to_string(TreeShape shape) {
  switch (shape) {
    case TreeShape::flat:
      return "flat";
    case TreeShape::binary:
      return "binary";
    case TreeShape::hierarchical:
      return "hier";
  }
  return "?";
}

std::size_t ReductionTree::sender_cluster(std::size_t merge_id) const {
  return nodes.at(nodes.at(merge_id).right).cluster;
}

bool ReductionTree::is_inter_cluster(std::size_t merge_id) const {
  return sender_cluster(merge_id) != nodes.at(merge_id).cluster;
}

namespace {

class TreeBuilder {
 public:
  explicit TreeBuilder(const Topology& topo) {
    tree_.leaf_count = topo.domain_count();
    for (std::size_t d = 0; d < topo.domain_count(); ++d) {
      TreeNode leaf;
      leaf.domain = d;
      leaf.owner = d;
      leaf.cluster = topo.cluster_of(d);
      tree_.nodes.push_back(leaf);
    }
  }

  std::size_t merge(std::size_t left, std::size_t right) {
    TreeNode n;
    n.left = left;
    n.right = right;
    n.owner = tree_.nodes[left].owner;
    n.cluster = tree_.nodes[left].cluster;
    n.level = std::max(tree_.nodes[left].level, tree_.nodes[right].level) + 1;
    tree_.nodes.push_back(n);
    return tree_.nodes.size() - 1;
  }

  std::size_t flat(const std::vector<std::size_t>& items) {
    std::size_t acc = items.front();
    for (std::size_t k = 1; k < items.size(); ++k) acc = merge(acc, items[k]);
    return acc;
  }

  std::size_t binary(std::vector<std::size_t> items) {
    while (items.size() > 1) {
      std::vector<std::size_t> next;
      for (std::size_t k = 0; k < items.size(); k += 2) {
        next.push_back(k + 1 < items.size() ? merge(items[k], items[k + 1]) : items[k]);
      }
      items = std::move(next);
    }
    return items.front();
  }

  std::size_t reduce(TreeShape shape, const std::vector<std::size_t>& items) {
    return shape == TreeShape::flat ? flat(items) : binary(items);
  }

  std::size_t owner(std::size_t id) const { return tree_.nodes[id].owner; }

  ReductionTree finish(std::size_t root) {
    tree_.root = root;
    return std::move(tree_);
  }

 private:
  ReductionTree tree_;
};

}  // namespace

ReductionTree build_tree(const Topology& topo, TreeShape shape, std::size_t procs_per_domain) {
  if (procs_per_domain == 0) throw DimensionError("procs_per_domain must be >= 1");
  TreeBuilder b(topo);
  const auto groups = groups_from_topology(topo);

  // Per cluster: the roots of its process-group domains, ascending.
  std::vector<std::vector<std::size_t>> domain_roots(groups.size());
  for (const ProcessGroup& g : groups) {
    const auto& members = g.members;
    for (std::size_t k = 0; k < members.size(); k += procs_per_domain) {
      const std::size_t end = std::min(members.size(), k + procs_per_domain);
      std::vector<std::size_t> run(members.begin() + static_cast<std::ptrdiff_t>(k),
                                   members.begin() + static_cast<std::ptrdiff_t>(end));
      domain_roots[g.group_id].push_back(b.flat(run));
    }
  }

  if (shape == TreeShape::hierarchical) {
    std::vector<std::size_t> cluster_roots;
    for (const auto& roots : domain_roots) cluster_roots.push_back(b.binary(roots));
    return b.finish(b.binary(cluster_roots));
  }

  std::vector<std::size_t> all;
  for (const auto& roots : domain_roots) all.insert(all.end(), roots.begin(), roots.end());
  std::sort(all.begin(), all.end(),
            [&b](std::size_t x, std::size_t y) { return b.owner(x) < b.owner(y); });
  return b.finish(b.reduce(shape, all));
}

std::size_t inter_cluster_edges(const ReductionTree& tree) {
  std::size_t count = 0;
  for (std::size_t id = tree.leaf_count; id < tree.nodes.size(); ++id) {
    if (tree.is_inter_cluster(id)) ++count;
  }
  return count;
}

std::size_t intra_cluster_edges(const ReductionTree& tree) {
  return tree.merge_count() - inter_cluster_edges(tree);
}

std::size_t message_depth(const ReductionTree& tree) {
  // Children precede parents, so one forward pass suffices.
  std::vector<std::size_t> depth(tree.nodes.size(), 0);
  for (std::size_t id = tree.leaf_count; id < tree.nodes.size(); ++id) {
    const TreeNode& n = tree.nodes[id];
    depth[id] = std::max(depth[n.left], depth[n.right] + 1);
  }
  return tree.root == kNoNode ? 0 : depth[tree.root];
}

}  // namespace gridqr
