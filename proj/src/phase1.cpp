#include "hdpref/phase1.hpp"

#include <stdexcept>

namespace hdpref {

std::vector<DimensionSet> make_blocks(Index d, Index m) {
  if (m < 1) throw std::invalid_argument("make_blocks: block size must be positive");
  if (d < 1) throw std::invalid_argument("make_blocks: no dimensions");
  std::vector<DimensionSet> blocks;
  for (Index first = 0; first < d; first += m) {
    blocks.push_back(DimensionSet::range(first, std::min(m, d - first)));
  }
  return blocks;
}

Phase1State::Phase1State(Index d, Index m) : m_(m), blocks_(make_blocks(d, m)) {}

DimensionSet Phase1State::unprocessed() const {
  std::vector<Index> dims;
  for (auto b = static_cast<std::size_t>(cursor_); b < blocks_.size(); ++b) {
    dims.insert(dims.end(), blocks_[b].begin(), blocks_[b].end());
  }
  return DimensionSet(std::move(dims));
}

Question Phase1State::next_question(const Dataset& X, Index s, Rng& rng) const {
  if (done()) throw std::logic_error("phase 1: no blocks left");
  Question q;
  q.probe = blocks_[static_cast<std::size_t>(cursor_)];
  q.shown = q.probe;
  // A short block borrows already-eliminated dimensions, lowest index first.
  const DimensionSet padding = eliminated_.sorted();
  for (Index dim : padding) {
    if (q.shown.size() >= m_) break;
    q.shown.push_back(dim);
  }
  q.rows = sample_tuples(X, q.shown, s, rng);
  return q;
}

void Phase1State::apply(const Answer& answer) {
  if (done()) throw std::logic_error("phase 1: no blocks left");
  const auto& block = blocks_[static_cast<std::size_t>(cursor_)];
  switch (answer.kind) {
    case Answer::Kind::choice:
      for (Index dim : block) kept_.push_back(dim);
      break;
    case Answer::Kind::opt_out:
      for (Index dim : block) eliminated_.push_back(dim);
      break;
    case Answer::Kind::quit:
      throw std::invalid_argument("phase 1: quit is handled by the session");
  }
  ++cursor_;
}

}  // namespace hdpref
