#include "hdpref/api.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace hdpref;
using namespace hdpref::testing;
using nlohmann::json;

namespace {

constexpr Index kN = 1200, kD = 30;

/// Raw table with a lower-is-better first column; the service sees its
/// normalized skyline.
RawTable raw_table() {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unit(1.0, 100.0);
  RawTable raw;
  for (Index j = 0; j < kD; ++j) {
    raw.column_names.push_back("attr" + std::to_string(j));
    raw.directions.push_back(j == 0 ? Direction::lower_better : Direction::higher_better);
  }
  for (Index i = 0; i < kN; ++i) {
    std::vector<std::optional<double>> row;
    for (Index j = 0; j < kD; ++j) row.emplace_back(unit(gen));
    raw.rows.push_back(std::move(row));
  }
  return raw;
}

struct Fixture {
  RawTable raw = raw_table();
  std::shared_ptr<const Dataset> data = std::make_shared<const Dataset>(skyline(load_table(raw)));
  std::chrono::steady_clock::time_point t = std::chrono::steady_clock::time_point{} + std::chrono::hours(1);
  api::SessionService service{api::ServiceOptions{std::chrono::seconds(3600), [this] { return t; }, 5}};

  Fixture() { service.register_dataset("cars", data, raw); }
};

/// Answers a wire question as `user` would, seeing only the displayed columns.
json wire_answer(const json& q, const SimulatedUser& user) {
  const auto idx = q["attribute_indices"].get<std::vector<Index>>();
  const auto& tuples = q["tuples"];
  RowMatrix full = RowMatrix::Zero(static_cast<Index>(tuples.size()), user.truth.dims());
  for (std::size_t r = 0; r < tuples.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c) full(static_cast<Index>(r), idx[c]) = tuples[r]["values"][c].get<double>();
  }
  const Answer a = user.answer(DimensionSet(idx), full);
  json body{{"question_index", q["question_index"]}, {"action", to_string(a.kind)}};
  if (a.is_choice()) body["choice"] = a.index;
  return body;
}

/// Drives `s` in process the same way, returning the result.
const SessionResult& drive(Session& s, const SimulatedUser& user, Index quit_at) {
  while (!s.terminal()) {
    const Question& q = s.current_question();
    if (s.question_index() == quit_at) s.submit(Answer::quit());
    else s.submit(user.answer(q.shown, displayed_tuples(s.data(), q)));
  }
  return s.result();
}

std::vector<std::int64_t> result_ids(const json& result) {
  std::vector<std::int64_t> ids;
  for (const auto& t : result["tuples"]) ids.push_back(t["id"].get<std::int64_t>());
  return ids;
}

std::vector<std::int64_t> engine_ids(const Dataset& X, const SessionResult& r) {
  if (r.kind == ResultKind::favorite) return {X.origin_id(r.favorite)};
  std::vector<std::int64_t> ids;
  for (Index row : r.regret_set) ids.push_back(X.origin_id(row));
  return ids;
}

int status_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const api::ApiError& e) {
    return e.status();
  }
  return 200;
}

}  // namespace

TEST_CASE("datasets are listed with their shape") {
  Fixture f;
  const json list = f.service.list_datasets();
  REQUIRE(list.size() == 1);
  CHECK(list[0]["name"] == "cars");
  CHECK(list[0]["n"] == f.data->size());
  CHECK(list[0]["d"] == kD);
  CHECK(list[0]["raw_values"] == true);
}

TEST_CASE("a default session opens on its first question") {
  Fixture f;
  const auto reply = f.service.create({{"dataset", "cars"}});
  CHECK(reply.status == 201);
  CHECK(reply.body["state"] == "question");
  const json& q = reply.body["question"];
  CHECK(q["session_id"] == reply.body["session_id"]);
  CHECK(q["question_index"] == 0);
  CHECK(q["phase"] == "coarse");
  CHECK(q["tuples"].size() == 2);
  CHECK(q["attributes"].size() <= 7);
  CHECK(q["attributes"].size() == q["attribute_indices"].size());
  CHECK(q["actions"] == json::array({"choose", "opt_out", "quit"}));
  const auto idx = q["attribute_indices"].get<std::vector<Index>>();
  for (const auto& t : q["tuples"]) {
    const auto row = f.data->row_of(t["id"].get<std::int64_t>());
    REQUIRE(row);
    for (std::size_t c = 0; c < idx.size(); ++c) {
      CHECK(t["values"][c].get<double>() == (*f.data)(*row, idx[c]));
      CHECK(q["attributes"][c] == f.data->attribute_names()[static_cast<std::size_t>(idx[c])]);
      CHECK(t["raw"][c].get<double>() == *f.raw.rows[static_cast<std::size_t>(t["id"].get<std::int64_t>())][static_cast<std::size_t>(idx[c])]);
    }
  }
  CHECK(f.service.question(reply.body["session_id"]).body == reply.body);
}

TEST_CASE("config overrides and their errors") {
  Fixture f;
  const auto five = f.service.create({{"dataset", "cars"}, {"config", {{"m", 5}}}});
  CHECK(five.body["question"]["attributes"].size() <= 5);

  CHECK(status_of([&] { f.service.create({{"dataset", "boats"}}); }) == 404);
  CHECK(status_of([&] { f.service.create(json::object()); }) == 422);
  CHECK(status_of([&] { f.service.create(json::array()); }) == 422);
  CHECK(status_of([&] { f.service.create({{"dataset", "cars"}, {"config", {{"s", 1}}}}); }) == 422);
  CHECK(status_of([&] { f.service.create({{"dataset", "cars"}, {"config", {{"colour", 1}}}}); }) == 422);
  CHECK(status_of([&] { f.service.create({{"dataset", "cars"}, {"config", {{"m", "seven"}}}}); }) == 422);
  CHECK(status_of([&] { f.service.create({{"dataset", "cars"}, {"config", {{"K", 100000}}}}); }) == 422);
}

TEST_CASE("the service reaches the same result as the engine") {
  Fixture f;
  Rng rng(1);
  for (int trial = 0; trial < 12; ++trial) {
    const SimulatedUser user{gen_sparse_utility(kD, 1 + static_cast<Index>(rng() % 4), rng)};
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(trial);
    // Every third run quits part-way to cover the K-set path too.
    const Index quit_at = trial % 3 == 2 ? static_cast<Index>(rng() % 12) : -1;

    auto reply = f.service.create({{"dataset", "cars"}, {"config", {{"seed", seed}}}});
    const std::string id = reply.body["session_id"];
    while (reply.body["state"] == "question") {
      const json& q = reply.body["question"];
      json body = wire_answer(q, user);
      if (q["question_index"] == quit_at) body = {{"question_index", quit_at}, {"action", "quit"}};
      reply = f.service.answer(id, body);
      CHECK(reply.status == 200);
    }
    const json result = reply.body["result"];
    CHECK(f.service.result(id).body == result);

    SessionConfig cfg;
    cfg.seed = seed;
    Session s(f.data, cfg);
    const SessionResult& r = drive(s, user, quit_at);
    CHECK(result["kind"] == to_string(r.kind));
    CHECK(result_ids(result) == engine_ids(*f.data, r));
    CHECK(result["questions_asked"] == r.questions_asked);
    CHECK(result["quit"] == r.quit);
    CHECK(result["phase_reached"] == to_string(r.phase_reached));
    CHECK(result["identified_keys"].size() == static_cast<std::size_t>(r.identified_keys.size()));
    CHECK(result.contains("coverage") == r.coverage.has_value());
    for (const auto& t : result["tuples"]) {
      CHECK(t["values"].size() == static_cast<std::size_t>(kD));
      CHECK(t["raw"].size() == static_cast<std::size_t>(kD));
    }
  }
}

TEST_CASE("answers are guarded by the question index") {
  Fixture f;
  const auto created = f.service.create({{"dataset", "cars"}});
  const std::string id = created.body["session_id"];
  const json choose{{"question_index", 0}, {"action", "choose"}, {"choice", 0}};
  CHECK(f.service.answer(id, choose).status == 200);
  CHECK(status_of([&] { f.service.answer(id, choose); }) == 409);
  CHECK(status_of([&] { f.service.answer(id, {{"question_index", 7}, {"action", "opt_out"}}); }) == 409);

  CHECK(status_of([&] { f.service.answer(id, {{"action", "opt_out"}}); }) == 422);
  CHECK(status_of([&] { f.service.answer(id, {{"question_index", 1}}); }) == 422);
  CHECK(status_of([&] { f.service.answer(id, {{"question_index", 1}, {"action", "shrug"}}); }) == 422);
  CHECK(status_of([&] { f.service.answer(id, {{"question_index", 1}, {"action", "choose"}}); }) == 422);
  CHECK(status_of([&] { f.service.answer(id, {{"question_index", 1}, {"action", "choose"}, {"choice", 2}}); }) == 422);
  CHECK(status_of([&] { f.service.answer(id, json::array()); }) == 422);

  CHECK(status_of([&] { f.service.question("00000000deadbeef"); }) == 404);
  CHECK(status_of([&] { f.service.answer("00000000deadbeef", choose); }) == 404);
  CHECK(status_of([&] { f.service.result(id); }) == 409);
  CHECK(f.service.question(id).body["question"]["question_index"] == 1);
}

TEST_CASE("quitting on the first question returns a K-set") {
  Fixture f;
  const auto created = f.service.create({{"dataset", "cars"}});
  const std::string id = created.body["session_id"];
  const auto reply = f.service.answer(id, {{"question_index", 0}, {"action", "quit"}});
  CHECK(reply.status == 200);
  CHECK(reply.body["state"] == "result");
  const json& r = reply.body["result"];
  CHECK(r["kind"] == "regret_set");
  CHECK(r["tuples"].size() == 30);
  CHECK(r["quit"] == true);
  CHECK(r["questions_asked"] == 0);
  CHECK(r["coverage"]["p_cover"].get<double>() > 0.0);
  CHECK(status_of([&] { f.service.answer(id, {{"question_index", 1}, {"action", "quit"}}); }) == 409);
}

TEST_CASE("opting out is refused on key attributes") {
  Fixture f;
  Rng rng(2);
  const SimulatedUser user{gen_sparse_utility(kD, 3, rng)};
  for (int trial = 0; trial < 10; ++trial) {
    auto reply = f.service.create({{"dataset", "cars"}});
    const std::string id = reply.body["session_id"];
    while (reply.body["state"] == "question" && reply.body["question"]["phase"] != "search") {
      reply = f.service.answer(id, wire_answer(reply.body["question"], user));
    }
    if (reply.body["state"] == "result") continue;
    const json& q = reply.body["question"];
    CHECK(q["actions"] == json::array({"choose", "quit"}));
    CHECK(status_of([&] { f.service.answer(id, {{"question_index", q["question_index"]}, {"action", "opt_out"}}); }) == 422);
    CHECK(f.service.question(id).body["state"] == "question");
    return;
  }
  FAIL("no run reached the search phase");
}

TEST_CASE("idle sessions expire as a quit") {
  Fixture f;
  const std::string a = f.service.create({{"dataset", "cars"}}).body["session_id"];
  const std::string b = f.service.create({{"dataset", "cars"}}).body["session_id"];
  f.service.answer(a, {{"question_index", 0}, {"action", "opt_out"}});

  f.t += std::chrono::minutes(59);
  f.service.answer(b, {{"question_index", 0}, {"action", "opt_out"}});
  f.t += std::chrono::minutes(2);
  CHECK(f.service.expire_idle() == 1);
  const auto ra = f.service.question(a);
  CHECK(ra.body["state"] == "result");
  CHECK(ra.body["result"]["quit"] == true);
  CHECK(ra.body["result"]["questions_asked"] == 1);
  CHECK(ra.body["result"]["tuples"].size() == 30);
  CHECK(f.service.question(b).body["state"] == "question");

  // Lazy expiry on access, without a sweep.
  f.t += std::chrono::hours(2);
  CHECK(f.service.result(b).body["quit"] == true);
  CHECK(f.service.expire_idle() == 0);
}

TEST_CASE("an idempotency key replays the first creation") {
  Fixture f;
  const auto first = f.service.create({{"dataset", "cars"}}, "key-1");
  const auto second = f.service.create({{"dataset", "cars"}}, "key-1");
  CHECK(first.body == second.body);
  CHECK(second.status == 201);
  CHECK(f.service.num_sessions() == 1);
  CHECK(f.service.create({{"dataset", "cars"}}, "key-2").body["session_id"] != first.body["session_id"]);
  CHECK(f.service.num_sessions() == 2);
}

TEST_CASE("the HTTP routes speak the same protocol") {
  Fixture f;
  httplib::Server server;
  api::mount(server, f.service);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  auto datasets = client.Get("/datasets");
  REQUIRE(datasets);
  CHECK(datasets->status == 200);
  CHECK(datasets->get_header_value("Content-Type").find("application/json") == 0);
  CHECK(json::parse(datasets->body)[0]["name"] == "cars");

  CHECK(client.Post("/sessions", R"({"dataset":"boats"})", "application/json")->status == 404);
  CHECK(client.Post("/sessions", "{not json", "application/json")->status == 422);
  CHECK(client.Get("/sessions/0123abcd/question")->status == 404);

  Rng rng(3);
  const SimulatedUser user{gen_sparse_utility(kD, 3, rng)};
  auto created = client.Post("/sessions", httplib::Headers{{"Idempotency-Key", "abc"}},
                             json{{"dataset", "cars"}, {"config", {{"seed", 77}}}}.dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  json state = json::parse(created->body);
  const std::string id = state["session_id"];
  auto again = client.Post("/sessions", httplib::Headers{{"Idempotency-Key", "abc"}},
                           json{{"dataset", "cars"}}.dump(), "application/json");
  CHECK(json::parse(again->body)["session_id"] == id);

  const std::string base = "/sessions/" + id;
  CHECK(client.Get(base + "/result")->status == 409);
  json last_answer;
  while (state["state"] == "question") {
    last_answer = wire_answer(state["question"], user);
    auto res = client.Post(base + "/answer", last_answer.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    state = json::parse(res->body);
  }
  CHECK(client.Post(base + "/answer", last_answer.dump(), "application/json")->status == 409);
  CHECK(client.Post(base + "/answer", "[", "application/json")->status == 422);
  auto result = client.Get(base + "/result");
  REQUIRE(result);
  CHECK(result->status == 200);
  CHECK(json::parse(result->body) == state["result"]);

  SessionConfig cfg;
  cfg.seed = 77;
  Session s(f.data, cfg);
  const SessionResult& r = drive(s, user, -1);
  CHECK(result_ids(state["result"]) == engine_ids(*f.data, r));
  CHECK(state["result"]["questions_asked"] == r.questions_asked);

  server.stop();
  thread.join();
}
