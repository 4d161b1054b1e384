#include "hdpref/api.hpp"

#include <httplib.h>

#include <cstdio>
#include <random>

namespace hdpref::api {

using nlohmann::json;

namespace {

json names_of(const Dataset& X, const DimensionSet& dims) {
  json out = json::array();
  for (Index j : dims) out.push_back(X.attribute_names()[static_cast<std::size_t>(j)]);
  return out;
}

json raw_cells(const RawTable& raw, std::int64_t origin, const DimensionSet& dims) {
  json out = json::array();
  const auto& row = raw.rows.at(static_cast<std::size_t>(origin));
  for (Index j : dims) {
    const auto& cell = row.at(static_cast<std::size_t>(j));
    out.push_back(cell ? json(*cell) : json(nullptr));
  }
  return out;
}

}  // namespace

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {
  std::uint64_t seed = options_.id_seed;
  if (seed == 0) seed = (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();
  rng_.seed(seed);
}

std::chrono::steady_clock::time_point SessionService::now() const {
  return options_.clock ? options_.clock() : std::chrono::steady_clock::now();
}

void SessionService::register_dataset(const std::string& name, std::shared_ptr<const Dataset> data,
                                      std::optional<RawTable> raw) {
  if (!data) throw std::invalid_argument("register_dataset: no data");
  if (raw) {
    if (raw->num_cols() != data->dims()) throw std::invalid_argument("register_dataset: raw table shape mismatch");
    for (std::int64_t id : data->origin_ids()) {
      if (id < 0 || id >= raw->num_rows()) throw std::invalid_argument("register_dataset: origin id outside raw table");
    }
  }
  std::lock_guard lock(mutex_);
  datasets_[name] = DatasetEntry{std::move(data), std::move(raw)};
}

json SessionService::list_datasets() const {
  std::lock_guard lock(mutex_);
  json out = json::array();
  for (const auto& [name, entry] : datasets_) {
    out.push_back({{"name", name},
                   {"n", entry.data->size()},
                   {"d", entry.data->dims()},
                   {"attributes", entry.data->attribute_names()},
                   {"raw_values", entry.raw.has_value()}});
  }
  return out;
}

std::string SessionService::new_id() {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_()));
  return buf;
}

Reply SessionService::create(const json& body, const std::string& idempotency_key) {
  if (!body.is_object()) throw ApiError(422, "request body must be an object");
  if (!body.contains("dataset") || !body["dataset"].is_string()) throw ApiError(422, "missing dataset name");
  const std::string name = body["dataset"].get<std::string>();

  std::unique_lock lock(mutex_);
  if (!idempotency_key.empty()) {
    if (auto it = idempotent_.find(idempotency_key); it != idempotent_.end()) return it->second;
  }
  auto ds = datasets_.find(name);
  if (ds == datasets_.end()) throw ApiError(404, "unknown dataset: " + name);

  SessionConfig base;
  base.seed = rng_();
  SessionConfig cfg;
  try {
    cfg = session_config_from_json(body.value("config", json::object()), base);
  } catch (const std::exception& e) {
    throw ApiError(422, std::string("invalid config: ") + e.what());
  }
  if (cfg.subset.K > ds->second.data->size()) throw ApiError(422, "invalid config: K exceeds the dataset size");

  std::string id;
  do {
    id = new_id();
  } while (sessions_.count(id));
  auto entry = std::make_shared<Entry>(Session(ds->second.data, cfg));
  entry->id = id;
  entry->dataset = name;
  entry->last_active = now();
  sessions_[id] = entry;
  lock.unlock();

  Reply reply;
  {
    std::lock_guard session_lock(entry->mutex);
    reply = {201, state_of(*entry)};
  }
  if (!idempotency_key.empty()) {
    std::lock_guard relock(mutex_);
    idempotent_.emplace(idempotency_key, reply);
  }
  return reply;
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "unknown session: " + id);
  return it->second;
}

void SessionService::expire_if_idle(Entry& e) {
  if (e.session.terminal()) return;
  if (now() - e.last_active <= options_.ttl) return;
  // Expiry counts as a quit so the answers given so far still produce a result.
  e.session.current_question();
  e.session.submit(Answer::quit());
}

std::size_t SessionService::expire_idle() {
  std::vector<std::shared_ptr<Entry>> all;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, e] : sessions_) all.push_back(e);
  }
  std::size_t count = 0;
  for (const auto& e : all) {
    std::lock_guard lock(e->mutex);
    const bool live = !e->session.terminal();
    expire_if_idle(*e);
    if (live && e->session.terminal()) ++count;
  }
  return count;
}

std::size_t SessionService::num_sessions() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

json SessionService::wire_question(Entry& e) const {
  const Question& q = e.session.current_question();
  const Dataset& X = e.session.data();
  const auto& raw = datasets_.at(e.dataset).raw;

  json tuples = json::array();
  for (Index r : q.rows) {
    json t{{"id", X.origin_id(r)}};
    json values = json::array();
    for (Index j : q.shown) values.push_back(X(r, j));
    t["values"] = std::move(values);
    if (raw) t["raw"] = raw_cells(*raw, X.origin_id(r), q.shown);
    tuples.push_back(std::move(t));
  }
  json actions = json::array({"choose"});
  // On key attributes every tuple has positive utility, so opting out is not an answer.
  if (e.session.phase() != Phase::search) actions.push_back("opt_out");
  actions.push_back("quit");
  return json{{"session_id", e.id},
              {"question_index", e.session.question_index()},
              {"phase", to_string(e.session.phase())},
              {"attributes", names_of(X, q.shown)},
              {"attribute_indices", q.shown.indices()},
              {"tuples", std::move(tuples)},
              {"actions", std::move(actions)}};
}

json SessionService::wire_result(const Entry& e) const {
  const SessionResult& r = e.session.result();
  const Dataset& X = e.session.data();
  const auto& raw = datasets_.at(e.dataset).raw;
  const DimensionSet all = DimensionSet::all(X.dims());

  std::vector<Index> rows = r.kind == ResultKind::favorite ? std::vector<Index>{r.favorite} : r.regret_set;
  json tuples = json::array();
  for (Index row : rows) {
    json t{{"id", X.origin_id(row)}};
    t["values"] = std::vector<double>(X.row(row).begin(), X.row(row).end());
    if (raw) t["raw"] = raw_cells(*raw, X.origin_id(row), all);
    tuples.push_back(std::move(t));
  }
  json out{{"session_id", e.id},
           {"kind", to_string(r.kind)},
           {"attributes", X.attribute_names()},
           {"tuples", std::move(tuples)},
           {"questions_asked", r.questions_asked},
           {"phase_reached", to_string(r.phase_reached)},
           {"identified_keys", names_of(X, r.identified_keys)},
           {"quit", r.quit}};
  if (r.coverage) out["coverage"] = to_json(*r.coverage);
  return out;
}

json SessionService::state_of(Entry& e) const {
  if (e.session.terminal()) return json{{"session_id", e.id}, {"state", "result"}, {"result", wire_result(e)}};
  return json{{"session_id", e.id}, {"state", "question"}, {"question", wire_question(e)}};
}

Reply SessionService::question(const std::string& id) {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  expire_if_idle(*e);
  return {200, state_of(*e)};
}

Reply SessionService::answer(const std::string& id, const json& body) {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  expire_if_idle(*e);

  if (!body.is_object()) throw ApiError(422, "request body must be an object");
  if (!body.contains("question_index") || !body["question_index"].is_number_integer()) {
    throw ApiError(422, "missing question_index");
  }
  if (!body.contains("action") || !body["action"].is_string()) throw ApiError(422, "missing action");
  Answer a;
  try {
    a.kind = answer_kind_from_string(body["action"].get<std::string>());
  } catch (const std::exception&) {
    throw ApiError(422, "unknown action");
  }

  if (e->session.terminal()) throw ApiError(409, "session is finished");
  const auto index = body["question_index"].get<std::int64_t>();
  if (index != e->session.question_index()) throw ApiError(409, "stale question_index");

  const Question& q = e->session.current_question();
  if (a.is_choice()) {
    if (!body.contains("choice") || !body["choice"].is_number_integer()) throw ApiError(422, "choose needs a choice");
    a.index = body["choice"].get<Index>();
    if (a.index < 0 || a.index >= static_cast<Index>(q.rows.size())) throw ApiError(422, "choice out of range");
  }
  if (a.kind == Answer::Kind::opt_out && e->session.phase() == Phase::search) {
    throw ApiError(422, "opt_out is not allowed on key attributes");
  }
  try {
    e->session.submit(a);
  } catch (const InconsistentAnswers& err) {
    throw ApiError(409, err.what());
  }
  e->last_active = now();
  return {200, state_of(*e)};
}

Reply SessionService::result(const std::string& id) {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  expire_if_idle(*e);
  if (!e->session.terminal()) throw ApiError(409, "session is still asking questions");
  return {200, wire_result(*e)};
}

namespace {

void send(httplib::Response& res, const Reply& reply) {
  res.status = reply.status;
  res.set_content(reply.body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send(res, {status, json{{"error", message}}});
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    send(res, f());
  } catch (const ApiError& e) {
    send_error(res, e.status(), e.what());
  } catch (const json::exception& e) {
    send_error(res, 422, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

}  // namespace

void mount(httplib::Server& server, SessionService& service, const std::string& static_dir) {
  server.Get("/datasets", [&service](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return Reply{200, service.list_datasets()}; });
  });
  server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = req.body.empty() ? json::object() : json::parse(req.body);
      return service.create(body, req.get_header_value("Idempotency-Key"));
    });
  });
  server.Get(R"(/sessions/([0-9a-f]+)/question)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return service.question(req.matches[1]); });
  });
  server.Post(R"(/sessions/([0-9a-f]+)/answer)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return service.answer(req.matches[1], json::parse(req.body)); });
  });
  server.Get(R"(/sessions/([0-9a-f]+)/result)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return service.result(req.matches[1]); });
  });
  if (!static_dir.empty() && !server.set_mount_point("/", static_dir)) {
    throw std::invalid_argument("cannot serve static files from " + static_dir);
  }
}

}  // namespace hdpref::api
