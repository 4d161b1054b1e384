#include "hdpref/preference.hpp"

#include "hdpref/lp.hpp"

#include <algorithm>
#include <numeric>

namespace hdpref {

UtilityVector::UtilityVector(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw std::invalid_argument("utility vector: empty");
  if ((weights_.array() < 0.0).any()) throw std::invalid_argument("utility vector: negative weight");
  const double total = weights_.sum();
  if (!(total > 0.0)) throw std::invalid_argument("utility vector: all weights zero");
  weights_ /= total;
}

DimensionSet UtilityVector::support() const {
  std::vector<Index> idx;
  for (Index i = 0; i < weights_.size(); ++i) {
    if (weights_(i) > 0.0) idx.push_back(i);
  }
  return DimensionSet(std::move(idx));
}

Index UtilityVector::support_size() const { return (weights_.array() > 0.0).count(); }

UtilityVector UtilityVector::restricted(const DimensionSet& dims) const {
  Vector w(dims.size());
  for (Index k = 0; k < dims.size(); ++k) w(k) = weights_(dims[k]);
  return UtilityVector(std::move(w));
}

double regret_ratio(const RowMatrix& X, std::span<const Index> subset, const Vector& u) {
  if (subset.empty()) throw std::invalid_argument("regret_ratio: empty subset");
  if (u.size() != X.cols()) throw std::invalid_argument("regret_ratio: dimension mismatch");
  const double best = (X * u).maxCoeff();
  if (!(best > 0.0)) throw std::logic_error("regret_ratio: dataset maximum utility is zero");
  double best_in_subset = -1.0;
  for (Index r : subset) {
    if (r < 0 || r >= X.rows()) throw std::out_of_range("regret_ratio: subset row out of range");
    best_in_subset = std::max(best_in_subset, X.row(r).dot(u));
  }
  return std::clamp(1.0 - best_in_subset / best, 0.0, 1.0);
}

double regret_ratio(const Dataset& X, std::span<const Index> subset, const UtilityVector& u) {
  return regret_ratio(X.values(), subset, u.weights());
}

namespace {

// maximize x  s.t.  u·q + x <= 1 (q in S),  u·p = 1,  u >= 0,  x >= 0.
double regret_against(const RowMatrix& X, std::span<const Index> subset, Index p) {
  const Index d = X.cols();
  LinearProgram<double> lp(d + 1);
  lp.objective(d) = 1.0;
  lp.ineq.resize(static_cast<Index>(subset.size()), d + 1);
  lp.ineq_rhs.setOnes(static_cast<Index>(subset.size()));
  for (std::size_t k = 0; k < subset.size(); ++k) {
    lp.ineq.row(static_cast<Index>(k)).head(d) = X.row(subset[k]);
    lp.ineq(static_cast<Index>(k), d) = 1.0;
  }
  lp.eq.resize(1, d + 1);
  lp.eq.row(0).head(d) = X.row(p);
  lp.eq(0, d) = 0.0;
  lp.eq_rhs.setOnes(1);
  const auto sol = solve(lp);
  if (!sol.optimal()) return 0.0;
  return std::clamp(sol.value, 0.0, 1.0);
}

}  // namespace

MaxRegretWitness max_regret_witness(const RowMatrix& X, std::span<const Index> subset) {
  if (subset.empty()) throw std::invalid_argument("max_regret_ratio: empty subset");
  std::vector<char> in_subset(static_cast<std::size_t>(X.rows()), 0);
  for (Index r : subset) {
    if (r < 0 || r >= X.rows()) throw std::out_of_range("max_regret_ratio: subset row out of range");
    in_subset[static_cast<std::size_t>(r)] = 1;
  }
  MaxRegretWitness best;
  for (Index p = 0; p < X.rows(); ++p) {
    if (in_subset[static_cast<std::size_t>(p)]) continue;
    // Rows dominated (weakly) by some member of the subset cannot add regret.
    bool covered = false;
    for (Index q : subset) {
      if ((X.row(q).array() >= X.row(p).array()).all()) {
        covered = true;
        break;
      }
    }
    if (covered) continue;
    const double r = regret_against(X, subset, p);
    if (r > best.regret) {
      best.regret = r;
      best.row = p;
    }
  }
  return best;
}

double max_regret_ratio(const RowMatrix& X, std::span<const Index> subset) {
  return max_regret_witness(X, subset).regret;
}

double max_regret_ratio(const Dataset& X, std::span<const Index> subset) {
  return max_regret_ratio(X.values(), subset);
}

UtilityVector gen_sparse_utility(Index d, Index d_int, Rng& rng, Index d_max) {
  if (d_int < 1) throw std::invalid_argument("gen_sparse_utility: d_int must be positive");
  if (d_int > d) throw std::invalid_argument("gen_sparse_utility: d_int exceeds d");
  if (d_int > d_max) throw std::invalid_argument("gen_sparse_utility: d_int exceeds d_max");

  std::vector<Index> dims(static_cast<std::size_t>(d));
  std::iota(dims.begin(), dims.end(), Index{0});
  // Partial Fisher-Yates: the first d_int entries are a uniform sample.
  for (Index i = 0; i < d_int; ++i) {
    std::uniform_int_distribution<Index> pick(i, d - 1);
    std::swap(dims[static_cast<std::size_t>(i)], dims[static_cast<std::size_t>(pick(rng))]);
  }
  // Weights on (0, 1]; zero would shrink the support.
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  Vector w = Vector::Zero(d);
  for (Index i = 0; i < d_int; ++i) w(dims[static_cast<std::size_t>(i)]) = 1.0 - weight(rng);
  return UtilityVector(std::move(w));
}

const char* to_string(Answer::Kind kind) {
  switch (kind) {
    case Answer::Kind::choice:
      return "choose";
    case Answer::Kind::opt_out:
      return "opt_out";
    case Answer::Kind::quit:
      return "quit";
  }
  return "?";
}

Answer::Kind answer_kind_from_string(const std::string& s) {
  if (s == "choose") return Answer::Kind::choice;
  if (s == "opt_out") return Answer::Kind::opt_out;
  if (s == "quit") return Answer::Kind::quit;
  throw std::invalid_argument("unknown answer kind: " + s);
}

Answer SimulatedUser::answer(const DimensionSet& dims, const RowMatrix& tuples) const {
  if (tuples.rows() == 0) throw std::invalid_argument("simulate_answer: no tuples");
  dims.check_bounds(truth.dims());
  Index best = -1;
  double best_value = 0.0;
  for (Index i = 0; i < tuples.rows(); ++i) {
    const double v = partial_utility(truth, dims, tuples.row(i));
    // Strict comparison keeps the lowest index on ties.
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best < 0) return Answer::opt_out();
  return Answer::choose(best);
}

}  // namespace hdpref
