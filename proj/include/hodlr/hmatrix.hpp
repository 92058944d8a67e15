#ifndef HODLR_HMATRIX_HPP
#define HODLR_HMATRIX_HPP

#include <chrono>
#include <ostream>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hodlr/aca.hpp"
#include "hodlr/cluster_tree.hpp"
#include "hodlr/kernel.hpp"
#include "hodlr/parallel.hpp"

namespace hodlr {

struct BuildReport {
  double init_seconds = 0.0;
  Index memory_bytes = 0;
  int max_block_rank = 0;
  Index num_low_rank_blocks = 0;
  Index num_dense_entries = 0;
  Index num_tolerance_failures = 0; // blocks that hit max_rank before tolerance
};

struct HMatrixOptions {
  int threads = 1;
  bool cache_panels = false;        // trade memory for matvec speed
  Index max_rank = 1 << 14;         // per-block ACA rank cap
  Index dense_entry_cap = 400'000'000;
};

/// Hierarchical kernel matrix: admissible same-level pairs hold
/// memory-efficient ACA factors, leaf self and near-field pairs are dense.
/// Immutable after initialize(); matvec and error queries are const.
class HMatrix {
 public:
  struct LowRankBlock {
    Index i = 0, j = 0;
    ACAFactor factor;
    Matrix panel_it, panel_sj; // cached K(I,tau), K(sigma,J) when enabled
  };
  struct DenseBlock {
    Index i = 0, j = 0;
    Matrix k;
  };

  static std::pair<HMatrix, BuildReport> initialize(const PointSet& points,
                                                    const HyperCube& domain,
                                                    const KernelSpec& kernel,
                                                    AdmissibilityPolicy policy, Index n_max,
                                                    double epsilon,
                                                    const HMatrixOptions& opts = {}) {
    if (!(epsilon > 0)) throw std::invalid_argument("HMatrix: epsilon must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    HMatrix h;
    h.kernel_ = kernel;
    h.policy_ = policy;
    h.epsilon_ = epsilon;
    h.cache_panels_ = opts.cache_panels;
    h.tree_ = build_tree(points, domain, n_max);
    const ClusterTree& tree = h.tree_;
    const BlockStructure bs = block_structure(tree, policy);
    const int depth = tree.depth();

    BuildReport report;

    // dense leaf blocks first so the entry cap fails fast
    const Index n_leaves = tree.nodes_at(depth);
    Index dense_entries = 0;
    for (Index i = 0; i < n_leaves; ++i) {
      const auto& nd = tree.node(depth, i);
      dense_entries += nd.size() * nd.size();
    }
    for (const auto& [i, j] : bs.leaf_near)
      dense_entries += tree.node(depth, i).size() * tree.node(depth, j).size();
    if (dense_entries > opts.dense_entry_cap)
      throw std::length_error("HMatrix: dense leaf storage exceeds the entry cap");
    report.num_dense_entries = dense_entries;

    h.leaf_self_.resize(n_leaves);
    parallel_for(n_leaves, opts.threads, [&](Index i, int) {
      const auto& nd = tree.node(depth, i);
      if (nd.size() == 0) return;
      h.leaf_self_[i] = dense_block(tree, kernel, depth, i, i);
    });
    h.leaf_near_.resize(bs.leaf_near.size());
    parallel_for(static_cast<Index>(bs.leaf_near.size()), opts.threads, [&](Index k, int) {
      const auto& [i, j] = bs.leaf_near[k];
      h.leaf_near_[k] = DenseBlock{i, j, dense_block(tree, kernel, depth, i, j)};
    });

    h.low_rank_.resize(depth + 1);
    for (int level = 1; level <= depth; ++level) {
      const auto& pairs = bs.admissible[level];
      auto& blocks = h.low_rank_[level];
      blocks.resize(pairs.size());
      parallel_for(static_cast<Index>(pairs.size()), opts.threads, [&](Index k, int) {
        const auto& [i, j] = pairs[k];
        LowRankBlock& blk = blocks[k];
        blk.i = i;
        blk.j = j;
        const BlockSpec spec = h.block_spec(level, i, j);
        if (spec.rows == 0 || spec.cols == 0) return; // empty box: rank 0
        blk.factor = compress(spec, epsilon, opts.max_rank);
        if (h.cache_panels_) h.fill_panels(blk, spec);
      });
    }

    for (const auto& lvl : h.low_rank_) {
      for (const auto& blk : lvl) {
        ++report.num_low_rank_blocks;
        report.max_block_rank = std::max(report.max_block_rank, blk.factor.rank);
        if (!blk.factor.tolerance_met) ++report.num_tolerance_failures;
        report.memory_bytes += blk.factor.memory_bytes();
      }
    }
    report.memory_bytes += dense_entries * static_cast<Index>(sizeof(double));
    report.init_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    h.threads_ = opts.threads;
    return {std::move(h), report};
  }

  const ClusterTree& tree() const { return tree_; }
  const KernelSpec& kernel() const { return kernel_; }
  AdmissibilityPolicy policy() const { return policy_; }
  double epsilon() const { return epsilon_; }
  Index size() const { return tree_.num_points(); }

  /// b = K q in the original point ordering.
  Vector matvec(const Vector& q) const {
    const Index n = size();
    if (q.size() != n) throw std::invalid_argument("HMatrix::matvec: length mismatch");
    Vector qt(n);
    for (Index t = 0; t < n; ++t) qt(t) = q(tree_.original_id(t));

    const int nthreads = std::max(1, threads_);
    std::vector<Vector> partial(nthreads, Vector::Zero(n));

    for (int level = 1; level <= tree_.depth(); ++level) {
      const auto& blocks = low_rank_[level];
      parallel_for(static_cast<Index>(blocks.size()), nthreads, [&](Index k, int w) {
        const LowRankBlock& blk = blocks[k];
        const BlockSpec spec = block_spec(level, blk.i, blk.j);
        if (spec.rows == 0 || spec.cols == 0 || blk.factor.rank == 0) return;
        const auto qj = qt.segment(spec.col_begin, spec.cols);
        if (cache_panels_) {
          Vector t = blk.panel_sj * qj;
          blk.factor.L.triangularView<Eigen::UnitLower>().solveInPlace(t);
          blk.factor.U.triangularView<Eigen::Upper>().solveInPlace(t);
          partial[w].segment(spec.row_begin, spec.rows) += blk.panel_it * t;
        } else {
          partial[w].segment(spec.row_begin, spec.rows) += apply(blk.factor, spec, qj);
        }
      });
    }
    const int depth = tree_.depth();
    parallel_for(tree_.nodes_at(depth), nthreads, [&](Index i, int w) {
      const auto& nd = tree_.node(depth, i);
      if (nd.size() == 0) return;
      partial[w].segment(nd.begin, nd.size()) +=
          leaf_self_[i] * qt.segment(nd.begin, nd.size());
    });
    parallel_for(static_cast<Index>(leaf_near_.size()), nthreads, [&](Index k, int w) {
      const DenseBlock& blk = leaf_near_[k];
      const auto& ni = tree_.node(depth, blk.i);
      const auto& nj = tree_.node(depth, blk.j);
      if (ni.size() == 0 || nj.size() == 0) return;
      partial[w].segment(ni.begin, ni.size()) += blk.k * qt.segment(nj.begin, nj.size());
    });

    Vector bt = Vector::Zero(n); // fixed reduction order keeps runs bit-identical
    for (const Vector& p : partial) bt += p;
    Vector b(n);
    for (Index t = 0; t < n; ++t) b(tree_.original_id(t)) = bt(t);
    return b;
  }

  /// Max relative error ||(K - H) q|| / ||K q|| over random unit vectors,
  /// measured against the dense kernel matrix.
  double relative_error(int trials = 20, std::uint64_t seed = 0) const {
    const Index n = size();
    if (n > 20000)
      throw std::length_error(
          "HMatrix::relative_error: N exceeds the dense-oracle guard (20000); "
          "use a sampled-row estimate instead");
    PointSet original(n, tree_.dim());
    for (Index t = 0; t < n; ++t) original.row(tree_.original_id(t)) = tree_.points().row(t);
    const Matrix k = assemble_dense(kernel_, original, original);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      Vector q(n);
      for (Index i = 0; i < n; ++i) q(i) = gauss(rng);
      q /= q.norm();
      const Vector exact = k * q;
      const double denom = exact.norm();
      worst = std::max(worst, (exact - matvec(q)).norm() / (denom > 0 ? denom : 1.0));
    }
    return worst;
  }

  /// Per-block structure report: level,block_i,block_j,class,rank,bytes
  void write_structure_csv(std::ostream& os) const {
    os << "level,block_i,block_j,class,rank,bytes\n";
    const int d = tree_.dim();
    for (int level = 1; level <= tree_.depth(); ++level) {
      for (const auto& blk : low_rank_[level]) {
        const auto cls =
            classify_pair(make_box_index(d, level, blk.i), make_box_index(d, level, blk.j));
        os << level << ',' << blk.i << ',' << blk.j << ',' << cls.name() << ','
           << blk.factor.rank << ',' << blk.factor.memory_bytes() << '\n';
      }
    }
    const int depth = tree_.depth();
    for (Index i = 0; i < tree_.nodes_at(depth); ++i) {
      const auto& nd = tree_.node(depth, i);
      os << depth << ',' << i << ',' << i << ",self," << nd.size() << ','
         << nd.size() * nd.size() * static_cast<Index>(sizeof(double)) << '\n';
    }
    for (const auto& blk : leaf_near_) {
      const auto cls =
          classify_pair(make_box_index(d, depth, blk.i), make_box_index(d, depth, blk.j));
      os << depth << ',' << blk.i << ',' << blk.j << ',' << cls.name() << ','
         << std::min(blk.k.rows(), blk.k.cols()) << ','
         << blk.k.size() * static_cast<Index>(sizeof(double)) << '\n';
    }
  }

  const std::vector<std::vector<LowRankBlock>>& low_rank_levels() const { return low_rank_; }
  const std::vector<DenseBlock>& leaf_near_blocks() const { return leaf_near_; }
  const std::vector<Matrix>& leaf_self_blocks() const { return leaf_self_; }

 private:
  BlockSpec block_spec(int level, Index i, Index j) const {
    const auto& ni = tree_.node(level, i);
    const auto& nj = tree_.node(level, j);
    return BlockSpec(kernel_, tree_.points(), ni.begin, ni.size(), tree_.points(), nj.begin,
                     nj.size());
  }

  static Matrix dense_block(const ClusterTree& tree, const KernelSpec& kernel, int level,
                            Index i, Index j) {
    const auto& ni = tree.node(level, i);
    const auto& nj = tree.node(level, j);
    Matrix k(ni.size(), nj.size());
    for (Index a = 0; a < ni.size(); ++a)
      for (Index b = 0; b < nj.size(); ++b)
        k(a, b) = eval_radial(
            kernel, (tree.points().row(ni.begin + a) - tree.points().row(nj.begin + b)).norm());
    return k;
  }

  void fill_panels(LowRankBlock& blk, const BlockSpec& spec) {
    const int r = blk.factor.rank;
    blk.panel_it.resize(spec.rows, r);
    blk.panel_sj.resize(r, spec.cols);
    for (int k = 0; k < r; ++k) {
      blk.panel_it.col(k) = spec.col(blk.factor.tau[k] - spec.col_begin);
      blk.panel_sj.row(k) = spec.row(blk.factor.sigma[k] - spec.row_begin).transpose();
    }
  }

  ClusterTree tree_;
  KernelSpec kernel_;
  AdmissibilityPolicy policy_ = AdmissibilityPolicy::WeakDD;
  double epsilon_ = 1e-6;
  bool cache_panels_ = false;
  int threads_ = 1;
  std::vector<std::vector<LowRankBlock>> low_rank_;
  std::vector<Matrix> leaf_self_;
  std::vector<DenseBlock> leaf_near_;
};

} // namespace hodlr

#endif
