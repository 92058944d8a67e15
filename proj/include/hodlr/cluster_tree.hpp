#ifndef HODLR_CLUSTER_TREE_HPP
#define HODLR_CLUSTER_TREE_HPP

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hodlr/geometry.hpp"
#include "hodlr/types.hpp"

namespace hodlr {

/// Which same-level box pairs are compressed.
///  - WeakDD:  far-field and vertex-sharing pairs (surface-sharing pairs with
///             d' >= 1 recurse and end up dense at the leaves)
///  - Strong:  far-field pairs only (every touching pair recurses)
///  - WeakAll: every non-self pair, i.e. all off-diagonal sibling blocks
enum class AdmissibilityPolicy { WeakDD, Strong, WeakAll };

inline bool is_admissible(AdmissibilityPolicy policy, const InteractionClass& cls) {
  switch (policy) {
    case AdmissibilityPolicy::WeakDD: return cls.is_far() || cls.is_vertex();
    case AdmissibilityPolicy::Strong: return cls.is_far();
    case AdmissibilityPolicy::WeakAll: return !cls.is_self();
  }
  return false;
}

inline const char* policy_name(AdmissibilityPolicy p) {
  switch (p) {
    case AdmissibilityPolicy::WeakDD: return "weakdd";
    case AdmissibilityPolicy::Strong: return "strong";
    case AdmissibilityPolicy::WeakAll: return "weakall";
  }
  return "?";
}

struct ClusterNode {
  Index begin = 0, end = 0;            // tree-ordered point range [begin, end)
  std::vector<Index> interaction_list; // admissible same-level boxes, ascending
  std::vector<Index> near_field;       // leaves only: boxes kept dense, ascending

  Index size() const { return end - begin; }
};

/// Per-level admissible pairs and leaf dense pairs for one policy.
/// Pairs are directed: (i, j) with j in the interaction list of i.
struct BlockStructure {
  AdmissibilityPolicy policy;
  std::vector<std::vector<std::pair<Index, Index>>> admissible; // [level][k] -> (i, j)
  std::vector<std::pair<Index, Index>> leaf_near;               // directed dense pairs
};

/// Balanced 2^d tree over a hyper-cube domain. All boxes subdivide at every
/// level; empty boxes carry empty index ranges. Immutable after build.
class ClusterTree {
 public:
  ClusterTree() = default;

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  Index n_max() const { return n_max_; }
  Index num_points() const { return points_.rows(); }
  const HyperCube& domain() const { return domain_; }
  Index nodes_at(int level) const { return Index(1) << (dim_ * level); }

  /// Points permuted into tree order (leaf by leaf).
  const PointSet& points() const { return points_; }
  Index original_id(Index tree_id) const { return orig_of_tree_[tree_id]; }
  Index tree_id(Index original_id) const { return tree_of_orig_[original_id]; }

  const ClusterNode& node(int level, Index id) const { return levels_[level][id]; }
  BoxIndex box(int level, Index id) const { return make_box_index(dim_, level, id); }
  HyperCube cube(int level, Index id) const { return box_cube(domain_, box(level, id)); }

  /// Same-level boxes in the clan classifying as far-field or vertex-sharing
  /// (the weak admissibility in d dimensions). Empty for the root.
  const std::vector<Index>& interaction_list(int level, Index id) const {
    return levels_[level][id].interaction_list;
  }

  /// Surface-sharing (d' >= 1) leaves kept dense. Leaf level only.
  const std::vector<Index>& leaf_near_field(Index leaf_id) const {
    return levels_[depth_][leaf_id].near_field;
  }
  const std::vector<Index>& near_field(int level, Index id) const {
    if (level != depth_) throw std::invalid_argument("near_field: node is not a leaf");
    return levels_[level][id].near_field;
  }

  friend ClusterTree build_tree(const PointSet&, const HyperCube&, Index);
  friend BlockStructure block_structure(const ClusterTree&, AdmissibilityPolicy);

 private:
  int dim_ = 0;
  HyperCube domain_;
  int depth_ = 0;
  Index n_max_ = 0;
  std::vector<std::vector<ClusterNode>> levels_;
  PointSet points_;
  std::vector<Index> orig_of_tree_, tree_of_orig_;
};

/// Interaction lists and leaf dense pairs under a policy. Candidate pairs at
/// each level are the siblings plus the children of the parent's
/// non-admissible pairs; admissible candidates are compressed at that level,
/// the rest recurse (at the leaves they form the dense near field). The
/// resulting blocks tile the index square exactly once for every policy.
inline BlockStructure block_structure(const ClusterTree& tree, AdmissibilityPolicy policy) {
  const int d = tree.dim();
  BlockStructure bs;
  bs.policy = policy;
  bs.admissible.resize(tree.depth() + 1);

  std::vector<std::vector<Index>> deferred(1); // per node of previous level
  for (int level = 1; level <= tree.depth(); ++level) {
    const Index n_nodes = tree.nodes_at(level);
    std::vector<std::vector<Index>> next(n_nodes);
    const Index n_children = Index(1) << d;
    for (Index i = 0; i < n_nodes; ++i) {
      const Index parent = i >> d;
      const BoxIndex bi = tree.box(level, i);
      auto consider = [&](Index j) {
        if (j == i) return;
        const InteractionClass cls = classify_pair(bi, tree.box(level, j));
        if (is_admissible(policy, cls))
          bs.admissible[level].emplace_back(i, j);
        else
          next[i].push_back(j);
      };
      for (Index c = 0; c < n_children; ++c) consider(parent * n_children + c);
      for (Index p : deferred[parent])
        for (Index c = 0; c < n_children; ++c) consider(p * n_children + c);
      std::sort(next[i].begin(), next[i].end());
    }
    deferred = std::move(next);
  }
  for (Index i = 0; i < static_cast<Index>(deferred.size()); ++i)
    for (Index j : deferred[i]) bs.leaf_near.emplace_back(i, j);
  return bs;
}

/// Build a balanced 2^d tree of the smallest depth at which every box holds
/// at most n_max points. Points are permuted into tree order; a point lying
/// exactly on an internal face goes to the box with the smaller grid index.
inline ClusterTree build_tree(const PointSet& points, const HyperCube& domain, Index n_max) {
  const Index n = points.rows();
  const int d = domain.dim();
  if (n < 1) throw std::invalid_argument("build_tree: empty point set");
  if (n_max < 1) throw std::invalid_argument("build_tree: n_max must be >= 1");
  if (points.cols() != d)
    throw std::invalid_argument("build_tree: point dimension does not match domain");
  for (Index i = 0; i < n; ++i)
    if (!domain.contains(points.row(i)))
      throw std::domain_error("build_tree: point outside the domain hyper-cube");

  ClusterTree tree;
  tree.dim_ = d;
  tree.domain_ = domain;
  tree.n_max_ = n_max;

  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  tree.levels_.push_back({ClusterNode{0, n, {}, {}}});

  // Subdivide every box until all boxes at the current depth fit n_max.
  int depth = 0;
  const Index n_children = Index(1) << d;
  while (true) {
    const auto& cur = tree.levels_[depth];
    bool fits = true;
    for (const auto& nd : cur)
      if (nd.size() > n_max) { fits = false; break; }
    if (fits) break;
    if ((depth + 1) * d > 60 || depth >= 40)
      throw std::runtime_error("build_tree: subdivision limit reached (coincident points?)");

    std::vector<ClusterNode> next(static_cast<std::size_t>(tree.nodes_at(depth + 1)));
    std::vector<Index> scratch(perm.size());
    for (Index b = 0; b < static_cast<Index>(cur.size()); ++b) {
      const ClusterNode& nd = cur[b];
      const Point c = box_cube(domain, make_box_index(d, depth, b)).center();
      // stable counting split of [begin, end) into 2^d children
      std::vector<Index> count(n_children, 0);
      auto child_of = [&](Index p) {
        std::uint64_t cc = 0;
        for (int k = 0; k < d; ++k)
          if (points(p, k) > c(k)) cc |= (std::uint64_t(1) << k);
        return static_cast<Index>(cc);
      };
      for (Index t = nd.begin; t < nd.end; ++t) ++count[child_of(perm[t])];
      std::vector<Index> offset(n_children, 0);
      Index acc = nd.begin;
      for (Index cc = 0; cc < n_children; ++cc) {
        offset[cc] = acc;
        next[b * n_children + cc].begin = acc;
        acc += count[cc];
        next[b * n_children + cc].end = acc;
      }
      for (Index t = nd.begin; t < nd.end; ++t) scratch[offset[child_of(perm[t])]++] = perm[t];
      std::copy(scratch.begin() + nd.begin, scratch.begin() + nd.end, perm.begin() + nd.begin);
    }
    tree.levels_.push_back(std::move(next));
    ++depth;
  }
  tree.depth_ = depth;

  tree.orig_of_tree_ = perm;
  tree.tree_of_orig_.resize(n);
  tree.points_.resize(n, d);
  for (Index t = 0; t < n; ++t) {
    tree.tree_of_orig_[perm[t]] = t;
    tree.points_.row(t) = points.row(perm[t]);
  }

  // Store the weak-admissibility lists on the nodes.
  BlockStructure bs = block_structure(tree, AdmissibilityPolicy::WeakDD);
  for (int level = 1; level <= depth; ++level)
    for (const auto& [i, j] : bs.admissible[level])
      tree.levels_[level][i].interaction_list.push_back(j);
  for (const auto& [i, j] : bs.leaf_near) tree.levels_[depth][i].near_field.push_back(j);
  for (auto& nd : tree.levels_[depth]) std::sort(nd.near_field.begin(), nd.near_field.end());
  for (auto& lvl : tree.levels_)
    for (auto& nd : lvl) std::sort(nd.interaction_list.begin(), nd.interaction_list.end());
  return tree;
}

} // namespace hodlr

#endif
