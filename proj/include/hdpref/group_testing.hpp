#ifndef HDPREF_GROUP_TESTING_HPP
#define HDPREF_GROUP_TESTING_HPP

// Fine selection by generalized binary splitting. Candidates are tested in
// groups of 2^α; a positive group is halved until one key attribute is
// isolated, and a negative test clears every probed attribute.

#include "hdpref/question.hpp"

#include <optional>
#include <variant>

namespace hdpref {

struct GroupTestIdle {};
/// Testing the candidates one at a time.
struct GroupTestScan {};
/// `active` is known to contain a key attribute; its lower half is probed next.
struct GroupTestSearch {
  std::vector<Index> active;
};
using GroupTestMode = std::variant<GroupTestIdle, GroupTestScan, GroupTestSearch>;

class GroupTestState {
 public:
  GroupTestState() = default;
  /// `candidates` are undecided, `nonkeys` already cleared (phase 1 eliminations).
  GroupTestState(DimensionSet candidates, DimensionSet nonkeys, Index d_max);

  const DimensionSet& candidates() const { return cand_; }
  const DimensionSet& keys() const { return keys_; }
  const DimensionSet& nonkeys() const { return nonkeys_; }
  Index d_left() const { return d_left_; }
  const GroupTestMode& mode() const { return mode_; }
  bool done() const { return d_left_ == 0 || cand_.empty(); }

  /// keys ∪ candidates: what is still possibly relevant.
  DimensionSet remaining() const { return set_union(keys_, cand_); }

  /// Sizes of every group drawn on an idle-to-group transition, in order.
  const std::vector<Index>& group_sizes() const { return group_sizes_; }
  /// The same draws before capping at the display size m.
  const std::vector<Index>& requested_group_sizes() const { return requested_group_sizes_; }

  /// Picks the next probe (drawing a fresh group when idle) and pads it with
  /// uniformly chosen known non-keys up to m shown attributes.
  Question next_question(const Dataset& X, Index s, Index m, Rng& rng);
  void apply(const Answer& answer);

  /// Continues as if `group` (a subset of the candidates) had just tested
  /// positive; the binary search probes it in the given order.
  void begin_search(std::vector<Index> group);

 private:
  void mark_key(Index dim);
  void mark_nonkey(Index dim);

  DimensionSet cand_;
  DimensionSet keys_;
  DimensionSet nonkeys_;
  Index d_left_ = 0;
  GroupTestMode mode_ = GroupTestIdle{};
  std::optional<std::vector<Index>> pending_probe_;
  bool pending_is_group_ = false;
  std::vector<Index> group_sizes_;
  std::vector<Index> requested_group_sizes_;
};

/// Worst-case number of questions of the binary-splitting scheme for `c`
/// candidates and at most `d_left` keys. `exact` is false when the closed
/// form has no valid decomposition and the looser α·d_left + c is returned.
struct QuestionBound {
  Index count = 0;
  bool exact = true;
};
QuestionBound question_bound(Index c, Index d_left);

/// ⌊log2((c - d_left + 1)/d_left)⌋ as used for the group size.
Index split_exponent(Index c, Index d_left);

}  // namespace hdpref

#endif  // HDPREF_GROUP_TESTING_HPP
