#include "hdpref/attribute_subset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace hdpref {

void SubsetRunConfig::validate() const {
  if (w < 1) throw std::invalid_argument("subset config: w must be positive");
  if (k <= w) throw std::invalid_argument("subset config: k must exceed w");
  if (K < 1) throw std::invalid_argument("subset config: K must be positive");
  if (max_iter < 1) throw std::invalid_argument("subset config: max_iter must be positive");
  if (assumed_keys < 1) throw std::invalid_argument("subset config: assumed_keys must be positive");
}

CoverageProbability coverage_probability(Index cand_size, Index d_int, Index w) {
  if (d_int < 0 || w < d_int) throw std::invalid_argument("coverage_probability: need 0 <= d_int <= w");
  if (w > cand_size) throw std::invalid_argument("coverage_probability: w exceeds the candidate count");
  // C(c - d, w - d) / C(c, w) = Π_{i<d} (w - i)/(c - i).
  long double p = 1.0L;
  for (Index i = 0; i < d_int; ++i) {
    p *= static_cast<long double>(w - i) / static_cast<long double>(cand_size - i);
  }
  const double bound = std::pow(static_cast<double>(w - d_int + 1) / static_cast<double>(cand_size - d_int + 1),
                                static_cast<double>(d_int));
  return {static_cast<double>(p), bound};
}

double coverage_confidence(double p, Index rounds) {
  return 1.0 - std::pow(1.0 - p, static_cast<double>(rounds));
}

Index rounds_for_confidence(double p, double conf) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("rounds_for_confidence: p must lie in (0, 1]");
  if (!(conf > 0.0 && conf < 1.0)) throw std::invalid_argument("rounds_for_confidence: conf must lie in (0, 1)");
  if (p == 1.0) return 1;
  const double n = std::log1p(-conf) / std::log1p(-p);
  auto rounds = static_cast<Index>(std::ceil(n));
  // Guard against n landing a hair above an integer through rounding.
  if (rounds > 1 && coverage_confidence(p, rounds - 1) >= conf) --rounds;
  return std::max<Index>(1, rounds);
}

std::vector<Index> sample_without_replacement(Index n, Index count, Rng& rng) {
  if (count > n || count < 0) throw std::invalid_argument("sample_without_replacement: bad count");
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

std::vector<Index> greedy_max_regret(const RowMatrix& points, Index k) {
  if (k < 1) throw std::invalid_argument("greedy_max_regret: k must be positive");
  const Index n = points.rows();
  if (n <= k) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    return all;
  }

  std::vector<Index> chosen;
  auto add = [&](Index r) {
    if (std::find(chosen.begin(), chosen.end(), r) == chosen.end()) chosen.push_back(r);
  };
  const Eigen::VectorXd sums = points.rowwise().sum();
  {
    Index best = 0;
    sums.maxCoeff(&best);
    add(best);
  }
  if (k >= points.cols()) {
    // Boundary coverage may push the max-sum row out when k is tight.
    std::vector<Index> maxima;
    for (Index j = 0; j < points.cols(); ++j) {
      Index best = 0;
      points.col(j).maxCoeff(&best);
      if (std::find(maxima.begin(), maxima.end(), best) == maxima.end()) maxima.push_back(best);
    }
    if (chosen.size() + maxima.size() > static_cast<std::size_t>(k)) chosen.clear();
    for (Index r : maxima) add(r);
  }

  while (static_cast<Index>(chosen.size()) < k) {
    const auto witness = max_regret_witness(points, chosen);
    if (witness.row >= 0) {
      add(witness.row);
      continue;
    }
    // Zero regret already: fill with the largest remaining row sums.
    Index best = -1;
    for (Index r = 0; r < n; ++r) {
      if (std::find(chosen.begin(), chosen.end(), r) != chosen.end()) continue;
      if (best < 0 || sums(r) > sums(best)) best = r;
    }
    add(best);
  }
  return chosen;
}

namespace {

SubsetIteration run_projection(const Dataset& X, DimensionSet dims, Index k, const SingleRoundSolver& solver) {
  RowMatrix projected(X.size(), dims.size());
  for (Index j = 0; j < dims.size(); ++j) projected.col(j) = X.values().col(dims[j]);
  const std::vector<Index> sky = skyline_rows(projected);

  SubsetIteration it;
  it.dims = std::move(dims);
  it.projected_skyline.resize(static_cast<Index>(sky.size()), it.dims.size());
  for (std::size_t i = 0; i < sky.size(); ++i) it.projected_skyline.row(static_cast<Index>(i)) = projected.row(sky[i]);
  it.local = solver(it.projected_skyline, k);
  if (static_cast<Index>(it.local.size()) > k) throw std::logic_error("single-round solver returned too many rows");
  for (Index local : it.local) it.rows.push_back(sky.at(static_cast<std::size_t>(local)));
  return it;
}

}  // namespace

SubsetResult attribute_subset(const Dataset& X, const DimensionSet& cand, const SubsetRunConfig& cfg, Rng& rng,
                              const SingleRoundSolver& solver) {
  cfg.validate();
  if (cand.empty()) throw std::invalid_argument("attribute_subset: empty candidate set");
  cand.check_bounds(X.dims());

  SubsetResult out;
  const Index target = std::min(cfg.K, X.size());
  out.capped = cfg.K > X.size();

  std::vector<Index> chosen;
  std::unordered_set<Index> in_set;
  auto merge = [&](const std::vector<Index>& rows) {
    for (Index r : rows) {
      if (in_set.insert(r).second) chosen.push_back(r);
    }
  };

  if (cfg.w >= cand.size()) {
    out.iterations.push_back(run_projection(X, cand, target, solver));
    merge(out.iterations.back().rows);
    out.report = CoverageReport{1.0, 1.0, 1, 1.0};
  } else {
    Index iter = 0;
    while (static_cast<Index>(chosen.size()) < target && iter < cfg.max_iter) {
      std::vector<Index> dims;
      for (Index pos : sample_without_replacement(cand.size(), cfg.w, rng)) dims.push_back(cand[pos]);
      out.iterations.push_back(run_projection(X, DimensionSet(std::move(dims)), cfg.k, solver));
      merge(out.iterations.back().rows);
      ++iter;
    }
    const Index keys = std::min({cfg.assumed_keys, cfg.w, cand.size()});
    const auto cover = coverage_probability(cand.size(), keys, cfg.w);
    out.report.p_cover = cover.p;
    out.report.lower_bound = cover.bound;
    out.report.rounds_executed = iter;
    out.report.confidence = coverage_confidence(cover.p, iter);
  }

  if (static_cast<Index>(chosen.size()) < target) {
    std::vector<Index> rest;
    for (Index r = 0; r < X.size(); ++r) {
      if (!in_set.count(r)) rest.push_back(r);
    }
    const Index missing = target - static_cast<Index>(chosen.size());
    for (Index pos : sample_without_replacement(static_cast<Index>(rest.size()), missing, rng)) {
      chosen.push_back(rest[static_cast<std::size_t>(pos)]);
    }
    out.padded = missing;
  } else if (static_cast<Index>(chosen.size()) > target) {
    auto keep = sample_without_replacement(static_cast<Index>(chosen.size()), target, rng);
    std::sort(keep.begin(), keep.end());
    std::vector<Index> down;
    for (Index pos : keep) down.push_back(chosen[static_cast<std::size_t>(pos)]);
    chosen = std::move(down);
  }
  out.rows = std::move(chosen);
  return out;
}

}  // namespace hdpref
