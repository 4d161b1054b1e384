#ifndef HDPREF_SESSION_HPP
#define HDPREF_SESSION_HPP

// One interactive elicitation: coarse elimination, then group testing over
// the surviving attributes, then the polytope search on the identified keys.
// A quit at any point ends the session with the best available answer.

#include "hdpref/attribute_subset.hpp"
#include "hdpref/group_testing.hpp"
#include "hdpref/phase1.hpp"
#include "hdpref/polytope_search.hpp"

#include <json.hpp>

#include <memory>
#include <optional>

namespace hdpref {

struct SessionConfig {
  Index m = 7;
  Index s = 2;
  Index d_max = kDefaultMaxKeys;
  SubsetRunConfig subset;
  std::uint64_t seed = 0;

  void validate() const;
};

const char* to_string(Phase phase);
Phase phase_from_string(const std::string& s);

enum class ResultKind { favorite, regret_set };
const char* to_string(ResultKind kind);

struct SessionResult {
  ResultKind kind = ResultKind::favorite;
  Index favorite = -1;                    ///< row of the session dataset
  std::vector<Index> regret_set;          ///< rows of the session dataset
  std::optional<CoverageReport> coverage;
  Index questions_asked = 0;
  Phase phase_reached = Phase::done;
  DimensionSet identified_keys;
  bool quit = false;
};

class SessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Session {
 public:
  Session(std::shared_ptr<const Dataset> data, SessionConfig cfg);

  const Dataset& data() const { return *data_; }
  std::shared_ptr<const Dataset> data_ptr() const { return data_; }
  const SessionConfig& config() const { return cfg_; }
  Phase phase() const { return phase_; }
  bool terminal() const { return result_.has_value(); }

  /// The pending question; generated on first access and stable until answered.
  const Question& current_question();
  /// Index of the pending question (number of answers submitted so far).
  Index question_index() const { return static_cast<Index>(log_.size()); }

  void submit(const Answer& answer);

  const SessionResult& result() const;
  const std::vector<AnsweredQuestion>& log() const { return log_; }
  Index questions_answered() const;

  /// Attributes still possibly relevant: what a quit would hand to the
  /// single-round fallback.
  DimensionSet candidate_dims() const;
  const Phase1State& coarse_state() const { return coarse_; }
  const GroupTestState& fine_state() const { return fine_; }
  const PolytopeSearch* search_state() const { return search_ ? &*search_ : nullptr; }

  nlohmann::json snapshot() const;
  /// Rebuilds a session by replaying the logged answers of a snapshot.
  static Session restore(std::shared_ptr<const Dataset> data, const nlohmann::json& snapshot);

 private:
  void advance();
  void finish_dimension_reduction();
  void finish_with_subset(DimensionSet cand, bool quit);
  void finish_with_favorite(Index row, bool quit);
  DimensionSet random_dims(Index count);

  std::shared_ptr<const Dataset> data_;
  SessionConfig cfg_;
  Rng rng_;
  Phase phase_ = Phase::coarse;
  Phase1State coarse_;
  GroupTestState fine_;
  std::optional<PolytopeSearch> search_;
  std::optional<Question> pending_;
  std::vector<AnsweredQuestion> log_;
  std::optional<SessionResult> result_;
};

nlohmann::json to_json(const SessionConfig& cfg);
SessionConfig session_config_from_json(const nlohmann::json& j, SessionConfig base = {});
nlohmann::json to_json(const CoverageReport& r);

}  // namespace hdpref

#endif  // HDPREF_SESSION_HPP
