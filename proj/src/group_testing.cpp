#include "hdpref/group_testing.hpp"

#include <algorithm>
#include <stdexcept>

namespace hdpref {

Index split_exponent(Index c, Index d_left) {
  if (d_left < 1) throw std::invalid_argument("split_exponent: d_left must be positive");
  const Index l = c - d_left + 1;
  Index alpha = 0;
  while ((Index{2} << alpha) * d_left <= l) ++alpha;
  return alpha;
}

QuestionBound question_bound(Index c, Index d_left) {
  if (c < 0 || d_left < 1) throw std::invalid_argument("question_bound: invalid arguments");
  if (c <= 2 * d_left - 2) return {c, true};
  const Index alpha = split_exponent(c, d_left);
  const Index pow = Index{1} << alpha;
  const Index rest = c - pow * d_left;
  if (rest >= 0) {
    const Index p = rest / pow;
    if (p < d_left) return {(alpha + 2) * d_left + p - 1, true};
  }
  return {alpha * d_left + c, false};
}

GroupTestState::GroupTestState(DimensionSet candidates, DimensionSet nonkeys, Index d_max)
    : cand_(std::move(candidates)), nonkeys_(std::move(nonkeys)), d_left_(d_max) {
  if (d_max < 1) throw std::invalid_argument("group testing: d_max must be positive");
  for (Index dim : cand_) {
    if (nonkeys_.contains(dim)) throw std::invalid_argument("group testing: candidate already marked non-key");
  }
}

void GroupTestState::mark_key(Index dim) {
  cand_.remove(dim);
  keys_.push_back(dim);
  --d_left_;
}

void GroupTestState::mark_nonkey(Index dim) {
  cand_.remove(dim);
  nonkeys_.push_back(dim);
}

Question GroupTestState::next_question(const Dataset& X, Index s, Index m, Rng& rng) {
  if (done()) throw std::logic_error("group testing: nothing left to test");

  std::vector<Index> probe;
  pending_is_group_ = false;
  if (auto* search = std::get_if<GroupTestSearch>(&mode_)) {
    const auto half = search->active.size() / 2;
    probe.assign(search->active.begin(), search->active.begin() + static_cast<std::ptrdiff_t>(half));
  } else if (cand_.size() <= 2 * d_left_ - 2) {
    mode_ = GroupTestScan{};
    probe.push_back(cand_[0]);
  } else {
    mode_ = GroupTestIdle{};
    const Index alpha = split_exponent(cand_.size(), d_left_);
    requested_group_sizes_.push_back(Index{1} << alpha);
    // Later groups can outgrow the display once d_left is small; halving keeps
    // the binary search exact.
    Index size = Index{1} << alpha;
    while (size > std::max<Index>(m, 1)) size /= 2;
    std::vector<Index> pool = cand_.indices();
    for (Index i = 0; i < size; ++i) {
      std::uniform_int_distribution<Index> pick(i, static_cast<Index>(pool.size()) - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    probe.assign(pool.begin(), pool.begin() + size);
    group_sizes_.push_back(size);
    pending_is_group_ = true;
  }

  Question q;
  q.probe = DimensionSet(probe);
  q.shown = q.probe;
  std::vector<Index> pad = nonkeys_.indices();
  const Index wanted = std::max<Index>(0, std::min<Index>(m - q.shown.size(), static_cast<Index>(pad.size())));
  for (Index i = 0; i < wanted; ++i) {
    std::uniform_int_distribution<Index> pick(i, static_cast<Index>(pad.size()) - 1);
    std::swap(pad[static_cast<std::size_t>(i)], pad[static_cast<std::size_t>(pick(rng))]);
    q.shown.push_back(pad[static_cast<std::size_t>(i)]);
  }
  q.rows = sample_tuples(X, q.shown, s, rng);
  pending_probe_ = std::move(probe);
  return q;
}

void GroupTestState::begin_search(std::vector<Index> group) {
  if (group.empty()) throw std::invalid_argument("group testing: empty group");
  for (Index dim : group) {
    if (!cand_.contains(dim)) throw std::invalid_argument("group testing: group member is not a candidate");
  }
  pending_probe_.reset();
  if (group.size() == 1) {
    mark_key(group.front());
    mode_ = GroupTestIdle{};
  } else {
    mode_ = GroupTestSearch{std::move(group)};
  }
}

void GroupTestState::apply(const Answer& answer) {
  if (!pending_probe_) throw std::logic_error("group testing: no pending question");
  if (answer.kind == Answer::Kind::quit) throw std::invalid_argument("group testing: quit is handled by the session");
  const std::vector<Index> probe = std::move(*pending_probe_);
  pending_probe_.reset();
  const bool positive = answer.is_choice();

  if (auto* search = std::get_if<GroupTestSearch>(&mode_)) {
    std::vector<Index> active = std::move(search->active);
    const auto half = static_cast<std::ptrdiff_t>(active.size() / 2);
    std::vector<Index> next;
    if (positive) {
      // The untested upper half simply stays among the candidates.
      next.assign(active.begin(), active.begin() + half);
    } else {
      for (Index dim : probe) mark_nonkey(dim);
      next.assign(active.begin() + half, active.end());
    }
    if (next.size() == 1) {
      mark_key(next.front());
      mode_ = GroupTestIdle{};
    } else {
      mode_ = GroupTestSearch{std::move(next)};
    }
  } else if (pending_is_group_) {
    if (!positive) {
      for (Index dim : probe) mark_nonkey(dim);
      mode_ = GroupTestIdle{};
    } else if (probe.size() == 1) {
      mark_key(probe.front());
      mode_ = GroupTestIdle{};
    } else {
      mode_ = GroupTestSearch{probe};
    }
  } else {
    if (positive) {
      mark_key(probe.front());
    } else {
      mark_nonkey(probe.front());
    }
  }
  if (done()) mode_ = GroupTestIdle{};
}

}  // namespace hdpref
