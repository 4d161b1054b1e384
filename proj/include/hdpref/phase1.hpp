#ifndef HDPREF_PHASE1_HPP
#define HDPREF_PHASE1_HPP

// Coarse elimination: the attributes are cut into blocks of m and each block
// is shown once. An opt-out discards the whole block.

#include "hdpref/question.hpp"

namespace hdpref {

/// ⌈d/m⌉ consecutive blocks; the last one holds the remainder.
std::vector<DimensionSet> make_blocks(Index d, Index m);

class Phase1State {
 public:
  Phase1State() = default;
  Phase1State(Index d, Index m);

  const std::vector<DimensionSet>& blocks() const { return blocks_; }
  Index cursor() const { return cursor_; }
  Index block_size() const { return m_; }
  const DimensionSet& kept() const { return kept_; }
  const DimensionSet& eliminated() const { return eliminated_; }
  /// Dimensions of blocks not yet asked about.
  DimensionSet unprocessed() const;
  bool done() const { return cursor_ >= static_cast<Index>(blocks_.size()); }

  /// Current block, padded with the lowest-indexed eliminated dimensions up to m.
  Question next_question(const Dataset& X, Index s, Rng& rng) const;
  /// Choice keeps the current block, opt-out eliminates it. Quit is rejected.
  void apply(const Answer& answer);

 private:
  Index m_ = 0;
  std::vector<DimensionSet> blocks_;
  Index cursor_ = 0;
  DimensionSet kept_;
  DimensionSet eliminated_;
};

}  // namespace hdpref

#endif  // HDPREF_PHASE1_HPP
