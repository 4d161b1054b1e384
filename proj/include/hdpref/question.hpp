#ifndef HDPREF_QUESTION_HPP
#define HDPREF_QUESTION_HPP

#include "hdpref/preference.hpp"

#include <vector>

namespace hdpref {

/// One displayed question: `rows` index the session dataset, `shown` are the
/// attributes the user sees and `probe` the subset whose status is under test.
/// Everything in `shown` but not in `probe` is known padding.
struct Question {
  DimensionSet shown;
  DimensionSet probe;
  std::vector<Index> rows;
};

enum class Phase { coarse = 1, fine = 2, search = 3, done = 4 };

struct AnsweredQuestion {
  Question question;
  Answer answer;
  Phase phase = Phase::coarse;
};

/// `s` distinct rows drawn uniformly; redrawn (up to `max_attempts` times) when
/// two of them coincide on the displayed attributes.
std::vector<Index> sample_tuples(const Dataset& X, const DimensionSet& shown, Index s, Rng& rng,
                                 int max_attempts = 20);

/// Full-dimensional values of the question's rows, ready for a simulated user.
RowMatrix displayed_tuples(const Dataset& X, const Question& q);

}  // namespace hdpref

#endif  // HDPREF_QUESTION_HPP
