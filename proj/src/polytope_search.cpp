#include "hdpref/polytope_search.hpp"

#include "hdpref/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hdpref {

namespace {

struct MarginSolution {
  Vector u;
  double t = 0.0;
};

// Variables [u, t]: maximize `objective`·[u, t] subject to
//   h·u >= t  (strict halfspaces; h·u >= floor instead when floor >= 0),
//   h·u >= 0  (non-strict halfspaces and every row of `extra`),
//   t <= 1, Σu = 1, u >= 0, t >= 0.
std::optional<MarginSolution> solve_over(const UtilityPolytope& poly, const RowMatrix& extra,
                                         const Vector& objective, double floor) {
  const Index dim = poly.dim();
  const auto& cons = poly.constraints();
  const Index rows = static_cast<Index>(cons.size()) + extra.rows() + 1;

  LinearProgram<double> lp(dim + 1);
  lp.objective = objective;
  lp.ineq = Eigen::MatrixXd::Zero(rows, dim + 1);
  lp.ineq_rhs = Vector::Zero(rows);
  Index r = 0;
  for (const auto& c : cons) {
    lp.ineq.row(r).head(dim) = -c.normal.transpose();
    if (c.strict) {
      if (floor >= 0.0) {
        lp.ineq_rhs(r) = -floor;
      } else {
        lp.ineq(r, dim) = 1.0;
      }
    }
    ++r;
  }
  for (Index k = 0; k < extra.rows(); ++k, ++r) lp.ineq.row(r).head(dim) = -extra.row(k);
  lp.ineq(r, dim) = 1.0;
  lp.ineq_rhs(r) = 1.0;

  lp.eq = Eigen::MatrixXd::Zero(1, dim + 1);
  lp.eq.row(0).head(dim).setOnes();
  lp.eq_rhs = Vector::Ones(1);

  const auto sol = solve(lp, kFeasibilityTol);
  if (!sol.optimal()) return std::nullopt;
  return MarginSolution{sol.x.head(dim), sol.x(dim)};
}

Vector margin_objective(Index dim) {
  Vector c = Vector::Zero(dim + 1);
  c(dim) = 1.0;
  return c;
}

bool has_strict(const UtilityPolytope& poly) {
  return std::any_of(poly.constraints().begin(), poly.constraints().end(),
                     [](const Halfspace& h) { return h.strict; });
}

}  // namespace

UtilityPolytope::UtilityPolytope(Index dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("utility polytope: dimension must be positive");
}

void UtilityPolytope::add(Vector normal, bool strict) {
  if (normal.size() != dim_) throw std::invalid_argument("utility polytope: dimension mismatch");
  constraints_.push_back({std::move(normal), strict});
}

std::optional<double> UtilityPolytope::margin() const {
  const auto sol = solve_over(*this, RowMatrix(0, dim_), margin_objective(dim_), -1.0);
  if (!sol) return std::nullopt;
  return sol->t;
}

bool UtilityPolytope::empty() const {
  const auto m = margin();
  if (!m) return true;
  return has_strict(*this) && *m <= kFeasibilityTol;
}

bool UtilityPolytope::contains(const Vector& u) const {
  if (u.size() != dim_ || (u.array() < 0.0).any()) return false;
  if (std::abs(u.sum() - 1.0) > 1e-9) return false;
  for (const auto& c : constraints_) {
    const double v = c.normal.dot(u);
    if (c.strict ? !(v > 0.0) : v < -kFeasibilityTol) return false;
  }
  return true;
}

Vector UtilityPolytope::interior_point(Rng& rng, int samples) const {
  const auto m = margin();
  if (!m) throw InconsistentAnswers("utility polytope is empty");
  const double floor = has_strict(*this) ? *m / 2.0 : -1.0;

  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector sum = Vector::Zero(dim_);
  int found = 0;
  for (int k = 0; k < samples; ++k) {
    Vector c = Vector::Zero(dim_ + 1);
    for (Index i = 0; i < dim_; ++i) c(i) = gauss(rng);
    const auto sol = solve_over(*this, RowMatrix(0, dim_), c, floor);
    if (sol) {
      sum += sol->u;
      ++found;
    }
  }
  if (found == 0) throw InconsistentAnswers("utility polytope has no interior");
  Vector v = sum / found;
  return v / v.sum();
}

Eigen::MatrixXd UtilityPolytope::sample(const Vector& start, Rng& rng, int count, int thin) const {
  if (start.size() != dim_) throw std::invalid_argument("utility polytope: dimension mismatch");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd out(dim_, count);
  Vector u = start;
  Vector dir(dim_);
  for (int k = 0; k < count * thin; ++k) {
    for (Index i = 0; i < dim_; ++i) dir(i) = gauss(rng);
    dir.array() -= dir.mean();  // stay on Σu = 1
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    auto clip = [&](double a, double b) {  // keep a + t·b >= 0
      if (b > 0.0) lo = std::max(lo, -a / b);
      else if (b < 0.0) hi = std::min(hi, -a / b);
    };
    for (Index i = 0; i < dim_; ++i) clip(u(i), dir(i));
    for (const auto& c : constraints_) clip(c.normal.dot(u), c.normal.dot(dir));
    if (lo < hi && std::isfinite(lo) && std::isfinite(hi)) u += (lo + (hi - lo) * unit(rng)) * dir;
    if (k % thin == thin - 1) out.col(k / thin) = u;
  }
  return out;
}

bool is_candidate(const Vector& p, const RowMatrix& others, const UtilityPolytope& poly) {
  if (p.size() != poly.dim() || (others.rows() > 0 && others.cols() != poly.dim())) {
    throw std::invalid_argument("is_candidate: dimension mismatch");
  }
  const bool strict = has_strict(poly);
  // Cutting planes: start without the comparison rows and add the most
  // violated ones until the relaxed optimum satisfies all of them.
  RowMatrix active(0, poly.dim());
  std::vector<char> used(static_cast<std::size_t>(others.rows()), 0);
  const Vector objective = margin_objective(poly.dim());
  constexpr Index kRowsPerRound = 8;
  for (;;) {
    const auto sol = solve_over(poly, active, objective, -1.0);
    if (!sol) return false;
    if (strict && sol->t <= kFeasibilityTol) return false;

    const Vector slack = (RowMatrix(others).rowwise() - p.transpose()) * sol->u;  // u·(q - p)
    std::vector<Index> violated;
    for (Index k = 0; k < others.rows(); ++k) {
      if (slack(k) > kFeasibilityTol) violated.push_back(k);
    }
    if (violated.empty()) return true;
    std::sort(violated.begin(), violated.end(), [&](Index a, Index b) { return slack(a) > slack(b); });

    Index added = 0;
    for (Index k : violated) {
      if (added == kRowsPerRound) break;
      if (used[static_cast<std::size_t>(k)]) continue;
      used[static_cast<std::size_t>(k)] = 1;
      active.conservativeResize(active.rows() + 1, Eigen::NoChange);
      active.row(active.rows() - 1) = p.transpose() - others.row(k);
      ++added;
    }
    // Every violated row is already enforced: only LP round-off remains.
    if (added == 0) return true;
  }
}

std::vector<Halfspace> harvest_constraints(const Dataset& X, const std::vector<AnsweredQuestion>& log,
                                           const DimensionSet& keys) {
  std::vector<Halfspace> out;
  for (const auto& entry : log) {
    if (!entry.answer.is_choice()) continue;
    const auto& q = entry.question;
    std::vector<Index> positions;
    for (Index k = 0; k < keys.size(); ++k) {
      if (q.shown.contains(keys[k])) positions.push_back(k);
    }
    // One displayed key only orders that attribute, which says nothing about u.
    if (positions.size() < 2) continue;
    const Index chosen = q.rows.at(static_cast<std::size_t>(entry.answer.index));
    for (Index other : q.rows) {
      if (other == chosen) continue;
      Vector h = Vector::Zero(keys.size());
      for (Index k : positions) h(k) = X(chosen, keys[k]) - X(other, keys[k]);
      if (h.isZero(0.0)) continue;
      out.push_back({std::move(h), true});
    }
  }
  return out;
}

PolytopeSearch::PolytopeSearch(const Dataset& X, DimensionSet keys, const std::vector<Halfspace>& initial)
    : keys_(std::move(keys)), poly_(keys_.size()) {
  keys_.check_bounds(X.dims());
  for (const auto& h : initial) poly_.add(h.normal, h.strict);
  if (poly_.empty()) throw InconsistentAnswers("earlier answers admit no utility vector");

  RowMatrix projected(X.size(), keys_.size());
  for (Index k = 0; k < keys_.size(); ++k) projected.col(k) = X.values().col(keys_[k]);
  std::vector<Index> sky = skyline_rows(projected);
  // Identical projections are interchangeable; keep the first.
  std::vector<Index> distinct;
  for (Index r : sky) {
    bool dup = false;
    for (Index s : distinct) {
      if (projected.row(s) == projected.row(r)) {
        dup = true;
        break;
      }
    }
    if (!dup) distinct.push_back(r);
  }
  pool_.resize(static_cast<Index>(distinct.size()), keys_.size());
  for (std::size_t i = 0; i < distinct.size(); ++i) pool_.row(static_cast<Index>(i)) = projected.row(distinct[i]);
  pool_rows_ = std::move(distinct);
  candidates_.resize(pool_rows_.size());
  std::iota(candidates_.begin(), candidates_.end(), Index{0});
  prune();
}

std::vector<Index> PolytopeSearch::candidates() const {
  std::vector<Index> rows;
  for (Index c : candidates_) rows.push_back(pool_rows_[static_cast<std::size_t>(c)]);
  return rows;
}

Index PolytopeSearch::pool_position(Index row) const {
  auto it = std::find(pool_rows_.begin(), pool_rows_.end(), row);
  if (it == pool_rows_.end()) throw std::invalid_argument("polytope search: row is not a candidate");
  return static_cast<Index>(it - pool_rows_.begin());
}

Vector PolytopeSearch::keyed(Index row) const { return pool_.row(pool_position(row)).transpose(); }

void PolytopeSearch::prune() {
  RowMatrix current(static_cast<Index>(candidates_.size()), pool_.cols());
  for (std::size_t i = 0; i < candidates_.size(); ++i) current.row(static_cast<Index>(i)) = pool_.row(candidates_[i]);
  std::vector<Index> kept;
  for (Index c : candidates_) {
    if (is_candidate(pool_.row(c).transpose(), current, poly_)) kept.push_back(c);
  }
  candidates_ = std::move(kept);
}

bool PolytopeSearch::terminal() const {
  if (candidates_.size() < 2) return true;
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates_.size(); ++j) {
      if (!asked_.count({candidates_[i], candidates_[j]})) return false;
    }
  }
  return true;
}

std::vector<Index> PolytopeSearch::next_tuples(Rng& rng, Index s) {
  if (candidates_.size() < 2) throw std::logic_error("polytope search: fewer than two candidates");
  constexpr int kSamples = 256;
  constexpr std::size_t kContenders = 8;
  const Eigen::MatrixXd U = poly_.sample(poly_.interior_point(rng), rng, kSamples);

  RowMatrix current(static_cast<Index>(candidates_.size()), pool_.cols());
  for (std::size_t i = 0; i < candidates_.size(); ++i) current.row(static_cast<Index>(i)) = pool_.row(candidates_[i]);
  const Eigen::MatrixXd scores = current * U;  // candidate x sample
  std::vector<Index> wins(candidates_.size(), 0);
  for (Index k = 0; k < kSamples; ++k) {
    Index best = 0;
    scores.col(k).maxCoeff(&best);
    ++wins[static_cast<std::size_t>(best)];
  }
  const Vector mean_score = scores.rowwise().mean();
  std::vector<std::size_t> ranked(candidates_.size());
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    if (wins[a] != wins[b]) return wins[a] > wins[b];
    return mean_score(static_cast<Index>(a)) > mean_score(static_cast<Index>(b));
  });

  // Prefer an even split among the frequent winners; widen the field when
  // all of their pairs have been asked already.
  std::optional<std::pair<std::size_t, std::size_t>> pair;
  for (std::size_t field = std::min(kContenders, ranked.size()); !pair; field = ranked.size()) {
    Index best_balance = -1;
    for (std::size_t i = 0; i < field; ++i) {
      for (std::size_t j = i + 1; j < field; ++j) {
        const std::size_t a = ranked[i], b = ranked[j];
        if (asked_.count(std::minmax(candidates_[a], candidates_[b]))) continue;
        const Index ahead = (scores.row(static_cast<Index>(a)).array() > scores.row(static_cast<Index>(b)).array()).count();
        const Index balance = std::min(ahead, kSamples - ahead);
        if (balance > best_balance) {
          best_balance = balance;
          pair = {a, b};
        }
      }
    }
    if (!pair && field == ranked.size()) {
      throw std::logic_error("polytope search: every candidate pair was already compared");
    }
  }

  std::vector<std::size_t> shown{pair->first, pair->second};
  for (std::size_t c : ranked) {
    if (static_cast<Index>(shown.size()) >= s) break;
    if (c != pair->first && c != pair->second) shown.push_back(c);
  }
  std::vector<Index> rows;
  for (std::size_t c : shown) rows.push_back(pool_rows_[static_cast<std::size_t>(candidates_[c])]);
  return rows;
}

std::pair<Index, Index> PolytopeSearch::next_pair(Rng& rng) {
  const auto rows = next_tuples(rng, 2);
  return {rows[0], rows[1]};
}

void PolytopeSearch::apply(Index chosen, const std::vector<Index>& shown) {
  const Index c = pool_position(chosen);
  if (std::find(shown.begin(), shown.end(), chosen) == shown.end()) {
    throw std::invalid_argument("polytope search: chosen row was not shown");
  }
  for (Index row : shown) {
    if (row == chosen) continue;
    const Index o = pool_position(row);
    asked_.insert(std::minmax(c, o));
    const Vector h = pool_.row(c).transpose() - pool_.row(o).transpose();
    if (h.isZero(0.0)) continue;
    poly_.add(h, true);
  }
  if (poly_.empty()) throw InconsistentAnswers("answers admit no utility vector");
  prune();
}

Index PolytopeSearch::result(Rng& rng) const {
  if (candidates_.empty()) throw std::logic_error("polytope search: no candidates");
  if (candidates_.size() == 1) return pool_rows_[static_cast<std::size_t>(candidates_.front())];
  const Vector v = poly_.interior_point(rng);
  Index best = candidates_.front();
  double best_score = pool_.row(best).dot(v);
  for (Index c : candidates_) {
    const double score = pool_.row(c).dot(v);
    if (score > best_score) {
      best = c;
      best_score = score;
    }
  }
  return pool_rows_[static_cast<std::size_t>(best)];
}

}  // namespace hdpref
