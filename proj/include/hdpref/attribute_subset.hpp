#ifndef HDPREF_ATTRIBUTE_SUBSET_HPP
#define HDPREF_ATTRIBUTE_SUBSET_HPP

// Single-round fallback when the user stops early: regret-minimizing sets are
// computed on random w-attribute projections of the candidate attributes and
// unioned until K tuples are collected.

#include "hdpref/preference.hpp"

#include <functional>

namespace hdpref {

struct SubsetRunConfig {
  Index w = 6;
  Index k = 7;
  Index K = 30;
  Index max_iter = 50;
  /// Key-count assumed when reporting coverage (the true count is unknown).
  Index assumed_keys = kDefaultMaxKeys;

  void validate() const;
};

struct CoverageReport {
  double p_cover = 1.0;
  double lower_bound = 1.0;
  Index rounds_executed = 0;
  double confidence = 1.0;
};

struct CoverageProbability {
  double p = 1.0;      ///< C(c - d_int, w - d_int) / C(c, w)
  double bound = 1.0;  ///< ((w - d_int + 1)/(c - d_int + 1))^d_int
};

/// Probability that w attributes drawn from `cand_size` contain all `d_int` keys.
CoverageProbability coverage_probability(Index cand_size, Index d_int, Index w);

/// 1 - (1 - p)^rounds.
double coverage_confidence(double p, Index rounds);

/// ⌈ln(1 - conf) / ln(1 - p)⌉, at least 1.
Index rounds_for_confidence(double p, double conf);

/// Single-round k-regret subroutine run on each projection. Must return at
/// most k distinct rows of its input, deterministically.
using SingleRoundSolver = std::function<std::vector<Index>(const RowMatrix& points, Index k)>;

/// Seeds with the max-sum row and, when k allows, one maximizer per attribute
/// (lowest row on ties; the max-sum row gives way if the maximizers fill k),
/// then repeatedly adds the row realizing the current maximum regret ratio.
std::vector<Index> greedy_max_regret(const RowMatrix& points, Index k);

struct SubsetIteration {
  DimensionSet dims;          ///< sampled attributes (columns of the session dataset)
  RowMatrix projected_skyline;  ///< skyline of the projection the solver saw
  std::vector<Index> local;   ///< solver output, rows of projected_skyline
  std::vector<Index> rows;    ///< the same tuples as rows of the session dataset
};

struct SubsetResult {
  std::vector<Index> rows;  ///< exactly min(K, n) distinct rows
  CoverageReport report;
  std::vector<SubsetIteration> iterations;
  Index padded = 0;         ///< rows added at random to reach K
  bool capped = false;      ///< K exceeded n
};

SubsetResult attribute_subset(const Dataset& X, const DimensionSet& cand, const SubsetRunConfig& cfg, Rng& rng,
                              const SingleRoundSolver& solver = greedy_max_regret);

/// `count` distinct uniformly drawn values from [0, n).
std::vector<Index> sample_without_replacement(Index n, Index count, Rng& rng);

}  // namespace hdpref

#endif  // HDPREF_ATTRIBUTE_SUBSET_HPP
