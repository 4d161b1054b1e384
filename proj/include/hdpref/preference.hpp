#ifndef HDPREF_PREFERENCE_HPP
#define HDPREF_PREFERENCE_HPP

#include "hdpref/dataset.hpp"

#include <random>
#include <span>
#include <stdexcept>

namespace hdpref {

using Rng = std::mt19937_64;

/// Upper bound on the number of attributes a user cares about.
inline constexpr Index kDefaultMaxKeys = 5;

/// Nonnegative, L1-normalized weights.
class UtilityVector {
 public:
  UtilityVector() = default;
  /// Rescales `weights` to unit L1 norm. Throws if any weight is negative or all are zero.
  explicit UtilityVector(Vector weights);

  const Vector& weights() const { return weights_; }
  Index dims() const { return weights_.size(); }
  double operator[](Index i) const { return weights_(i); }
  DimensionSet support() const;
  Index support_size() const;

  /// Weights restricted to `dims`, renormalized.
  UtilityVector restricted(const DimensionSet& dims) const;

 private:
  Vector weights_;
};

template <typename U, typename P>
typename U::Scalar utility(const Eigen::MatrixBase<U>& u, const Eigen::MatrixBase<P>& p) {
  if (u.size() != p.size()) throw std::invalid_argument("utility: dimension mismatch");
  return u.derived().reshaped().dot(p.derived().reshaped().template cast<typename U::Scalar>());
}

template <typename P>
double utility(const UtilityVector& u, const Eigen::MatrixBase<P>& p) {
  return utility(u.weights(), p);
}

template <typename P>
double partial_utility(const UtilityVector& u, const DimensionSet& dims, const Eigen::MatrixBase<P>& p) {
  if (u.dims() != p.size()) throw std::invalid_argument("partial_utility: dimension mismatch");
  double sum = 0.0;
  for (Index i : dims) sum += u[i] * p.derived().reshaped()(i);
  return sum;
}

/// 1 - max_{p in subset} u·p / max_{p in X} u·p.
double regret_ratio(const RowMatrix& X, std::span<const Index> subset, const Vector& u);
double regret_ratio(const Dataset& X, std::span<const Index> subset, const UtilityVector& u);

/// Supremum of the regret ratio of `subset` over every nonnegative utility,
/// one linear program per row of X.
double max_regret_ratio(const RowMatrix& X, std::span<const Index> subset);
double max_regret_ratio(const Dataset& X, std::span<const Index> subset);

struct MaxRegretWitness {
  double regret = 0.0;
  Index row = -1;  ///< row of X attaining the regret, -1 when it is zero
};
MaxRegretWitness max_regret_witness(const RowMatrix& X, std::span<const Index> subset);

/// Exactly d_int positive weights on uniformly chosen distinct dimensions.
UtilityVector gen_sparse_utility(Index d, Index d_int, Rng& rng, Index d_max = kDefaultMaxKeys);

struct Answer {
  enum class Kind { choice, opt_out, quit };

  Kind kind = Kind::opt_out;
  Index index = -1;  ///< position of the chosen tuple when kind == choice

  static Answer choose(Index i) { return {Kind::choice, i}; }
  static Answer opt_out() { return {Kind::opt_out, -1}; }
  static Answer quit() { return {Kind::quit, -1}; }

  bool is_choice() const { return kind == Kind::choice; }
  friend bool operator==(const Answer&, const Answer&) = default;
};

const char* to_string(Answer::Kind kind);
Answer::Kind answer_kind_from_string(const std::string& s);

enum class TieBreak { lowest_index };

/// Noise-free user answering by partial utility over the displayed attributes.
struct SimulatedUser {
  UtilityVector truth;
  TieBreak tie_break = TieBreak::lowest_index;

  /// `tuples` holds full-dimensional rows; only `dims` are visible.
  Answer answer(const DimensionSet& dims, const RowMatrix& tuples) const;
};

inline Answer simulate_answer(const SimulatedUser& user, const DimensionSet& dims, const RowMatrix& tuples) {
  return user.answer(dims, tuples);
}

}  // namespace hdpref

#endif  // HDPREF_PREFERENCE_HPP
