#include "hdpref/session.hpp"

#include <algorithm>

namespace hdpref {

using nlohmann::json;

void SessionConfig::validate() const {
  if (m < 1) throw std::invalid_argument("session config: m must be positive");
  if (s < 2) throw std::invalid_argument("session config: s must be at least 2");
  if (d_max < 1) throw std::invalid_argument("session config: d_max must be positive");
  subset.validate();
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::coarse:
      return "coarse";
    case Phase::fine:
      return "fine";
    case Phase::search:
      return "search";
    case Phase::done:
      return "done";
  }
  return "?";
}

Phase phase_from_string(const std::string& s) {
  if (s == "coarse") return Phase::coarse;
  if (s == "fine") return Phase::fine;
  if (s == "search") return Phase::search;
  if (s == "done") return Phase::done;
  throw std::invalid_argument("unknown phase: " + s);
}

const char* to_string(ResultKind kind) { return kind == ResultKind::favorite ? "favorite" : "regret_set"; }

Session::Session(std::shared_ptr<const Dataset> data, SessionConfig cfg)
    : data_(std::move(data)), cfg_(cfg), rng_(cfg.seed) {
  if (!data_) throw std::invalid_argument("session: no dataset");
  cfg_.validate();
  coarse_ = Phase1State(data_->dims(), std::min(cfg_.m, data_->dims()));
}

const Question& Session::current_question() {
  if (terminal()) throw SessionError("session is finished");
  if (!pending_) {
    switch (phase_) {
      case Phase::coarse:
        pending_ = coarse_.next_question(*data_, cfg_.s, rng_);
        break;
      case Phase::fine:
        pending_ = fine_.next_question(*data_, cfg_.s, cfg_.m, rng_);
        break;
      case Phase::search: {
        Question q;
        q.shown = search_->keys();
        q.probe = search_->keys();
        q.rows = search_->next_tuples(rng_, cfg_.s);
        pending_ = std::move(q);
        break;
      }
      case Phase::done:
        throw std::logic_error("session: done without a result");
    }
  }
  return *pending_;
}

Index Session::questions_answered() const {
  return static_cast<Index>(std::count_if(log_.begin(), log_.end(), [](const AnsweredQuestion& a) {
    return a.answer.kind != Answer::Kind::quit;
  }));
}

DimensionSet Session::candidate_dims() const {
  switch (phase_) {
    case Phase::coarse:
      return set_union(coarse_.kept(), coarse_.unprocessed());
    case Phase::fine:
      return fine_.remaining();
    case Phase::search:
    case Phase::done:
      return fine_.keys();
  }
  return {};
}

void Session::submit(const Answer& answer) {
  if (terminal()) throw SessionError("session is finished");
  const Question q = current_question();
  if (answer.kind == Answer::Kind::choice &&
      (answer.index < 0 || answer.index >= static_cast<Index>(q.rows.size()))) {
    throw std::invalid_argument("answer: choice index out of range");
  }
  log_.push_back({q, answer, phase_});
  pending_.reset();

  if (answer.kind == Answer::Kind::quit) {
    if (phase_ == Phase::search) {
      finish_with_favorite(search_->result(rng_), true);
    } else {
      finish_with_subset(candidate_dims(), true);
    }
    return;
  }

  switch (phase_) {
    case Phase::coarse:
      coarse_.apply(answer);
      break;
    case Phase::fine:
      fine_.apply(answer);
      break;
    case Phase::search:
      if (!answer.is_choice()) {
        // Every shown attribute is a key, so an opt-out contradicts phase two.
        throw InconsistentAnswers("opt-out on key attributes contradicts earlier answers");
      }
      search_->apply(q.rows[static_cast<std::size_t>(answer.index)], q.rows);
      break;
    case Phase::done:
      break;
  }
  advance();
}

void Session::advance() {
  if (phase_ == Phase::coarse && coarse_.done()) {
    fine_ = GroupTestState(coarse_.kept(), coarse_.eliminated(), cfg_.d_max);
    phase_ = Phase::fine;
  }
  if (phase_ == Phase::fine && fine_.done()) {
    finish_dimension_reduction();
    return;
  }
  if (phase_ == Phase::search && search_->terminal()) {
    finish_with_favorite(search_->result(rng_), false);
  }
}

void Session::finish_dimension_reduction() {
  phase_ = Phase::search;
  const DimensionSet keys = fine_.keys();
  if (keys.empty()) {
    // Nothing was relevant: fall back to a random attribute sample.
    finish_with_subset(random_dims(std::min(cfg_.subset.w, data_->dims())), false);
    return;
  }
  if (keys.size() == 1) {
    // A single key orders tuples by that attribute alone; no question can help.
    Index best = 0;
    data_->values().col(keys[0]).maxCoeff(&best);
    finish_with_favorite(best, false);
    return;
  }
  search_.emplace(*data_, keys, harvest_constraints(*data_, log_, keys));
  if (search_->terminal()) finish_with_favorite(search_->result(rng_), false);
}

DimensionSet Session::random_dims(Index count) {
  auto picks = sample_without_replacement(data_->dims(), count, rng_);
  std::sort(picks.begin(), picks.end());
  return DimensionSet(std::move(picks));
}

void Session::finish_with_subset(DimensionSet cand, bool quit) {
  if (cand.empty()) cand = random_dims(std::min(cfg_.subset.w, data_->dims()));
  auto subset = attribute_subset(*data_, cand, cfg_.subset, rng_);
  SessionResult r;
  r.kind = ResultKind::regret_set;
  r.regret_set = std::move(subset.rows);
  r.coverage = subset.report;
  r.questions_asked = questions_answered();
  r.phase_reached = quit ? phase_ : Phase::done;
  r.identified_keys = fine_.keys();
  r.quit = quit;
  result_ = std::move(r);
  phase_ = Phase::done;
}

void Session::finish_with_favorite(Index row, bool quit) {
  SessionResult r;
  r.kind = ResultKind::favorite;
  r.favorite = row;
  r.questions_asked = questions_answered();
  r.phase_reached = quit ? phase_ : Phase::done;
  r.identified_keys = fine_.keys();
  r.quit = quit;
  result_ = std::move(r);
  phase_ = Phase::done;
}

const SessionResult& Session::result() const {
  if (!result_) throw SessionError("session is not finished");
  return *result_;
}

json to_json(const SessionConfig& cfg) {
  return json{{"m", cfg.m},
              {"s", cfg.s},
              {"d_max", cfg.d_max},
              {"seed", cfg.seed},
              {"w", cfg.subset.w},
              {"k", cfg.subset.k},
              {"K", cfg.subset.K},
              {"max_iter", cfg.subset.max_iter},
              {"assumed_keys", cfg.subset.assumed_keys}};
}

SessionConfig session_config_from_json(const json& j, SessionConfig base) {
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      base.seed = value.get<std::uint64_t>();
      continue;
    }
    const Index v = value.get<Index>();
    if (key == "m") base.m = v;
    else if (key == "s") base.s = v;
    else if (key == "d_max") base.d_max = v;
    else if (key == "w") base.subset.w = v;
    else if (key == "k") base.subset.k = v;
    else if (key == "K") base.subset.K = v;
    else if (key == "max_iter") base.subset.max_iter = v;
    else if (key == "assumed_keys") base.subset.assumed_keys = v;
    else throw std::invalid_argument("unknown config field: " + key);
  }
  // k follows w unless it was set explicitly.
  if (j.contains("w") && !j.contains("k")) base.subset.k = base.subset.w + 1;
  base.validate();
  return base;
}

json to_json(const CoverageReport& r) {
  return json{{"p_cover", r.p_cover},
              {"lower_bound", r.lower_bound},
              {"rounds_executed", r.rounds_executed},
              {"confidence", r.confidence}};
}

namespace {

json ids_of(const Dataset& X, const std::vector<Index>& rows) {
  json out = json::array();
  for (Index r : rows) out.push_back(X.origin_id(r));
  return out;
}

json to_json(const Question& q, const Dataset& X) {
  return json{{"shown", q.shown.indices()}, {"probe", q.probe.indices()}, {"tuples", ids_of(X, q.rows)}};
}

}  // namespace

json Session::snapshot() const {
  json j;
  j["version"] = 1;
  j["config"] = to_json(cfg_);
  j["phase"] = to_string(phase_);
  j["question_index"] = question_index();
  j["kept"] = coarse_.kept().indices();
  j["eliminated"] = coarse_.eliminated().indices();
  j["candidates"] = candidate_dims().indices();
  j["keys"] = fine_.keys().indices();
  j["nonkeys"] = fine_.nonkeys().indices();
  json cons = json::array();
  if (search_) {
    for (const auto& h : search_->polytope().constraints()) {
      cons.push_back({{"normal", std::vector<double>(h.normal.data(), h.normal.data() + h.normal.size())},
                      {"strict", h.strict}});
    }
  }
  j["constraints"] = cons;
  json log = json::array();
  for (const auto& entry : log_) {
    json e = to_json(entry.question, *data_);
    e["answer"] = {{"action", to_string(entry.answer.kind)}};
    if (entry.answer.is_choice()) e["answer"]["choice"] = entry.answer.index;
    log.push_back(std::move(e));
  }
  j["log"] = std::move(log);
  if (pending_) j["pending"] = to_json(*pending_, *data_);
  return j;
}

Session Session::restore(std::shared_ptr<const Dataset> data, const json& snap) {
  if (snap.value("version", 0) != 1) throw std::invalid_argument("snapshot: unsupported version");
  Session s(std::move(data), session_config_from_json(snap.at("config")));
  for (const auto& e : snap.at("log")) {
    const Question& q = s.current_question();
    if (to_json(q, s.data()) != json{{"shown", e.at("shown")}, {"probe", e.at("probe")}, {"tuples", e.at("tuples")}}) {
      throw std::invalid_argument("snapshot: replay diverged from the logged questions");
    }
    const auto& a = e.at("answer");
    Answer answer;
    answer.kind = answer_kind_from_string(a.at("action").get<std::string>());
    if (answer.is_choice()) answer.index = a.at("choice").get<Index>();
    s.submit(answer);
  }
  if (snap.contains("pending") && !s.terminal()) {
    if (to_json(s.current_question(), s.data()) != snap.at("pending")) {
      throw std::invalid_argument("snapshot: pending question does not match");
    }
  }
  return s;
}

}  // namespace hdpref
