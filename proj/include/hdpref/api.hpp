#ifndef HDPREF_API_HPP
#define HDPREF_API_HPP

// HTTP/JSON front of the session engine. SessionService holds the state and
// speaks JSON in and out; mount() wires it onto an httplib server.

#include "hdpref/session.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <mutex>

namespace httplib {
class Server;
}

namespace hdpref::api {

/// Carries the HTTP status the failure maps to.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

using Clock = std::function<std::chrono::steady_clock::time_point()>;

struct ServiceOptions {
  std::chrono::seconds ttl{3600};  ///< idle time after which a session is quit
  Clock clock;                     ///< steady_clock::now when empty
  std::uint64_t id_seed = 0;       ///< session ids and default session seeds; random when 0
};

struct Reply {
  int status = 200;
  nlohmann::json body;
};

class SessionService {
 public:
  explicit SessionService(ServiceOptions options = {});

  /// `raw` (rows indexed by origin id) lets clients show unnormalized values.
  void register_dataset(const std::string& name, std::shared_ptr<const Dataset> data,
                        std::optional<RawTable> raw = std::nullopt);
  nlohmann::json list_datasets() const;

  /// Body: {"dataset": name, "config": {...}}. A repeated idempotency key
  /// returns the reply of the first call.
  Reply create(const nlohmann::json& body, const std::string& idempotency_key = "");
  Reply question(const std::string& id);
  /// Body: {"question_index": i, "action": "choose"|"opt_out"|"quit", "choice": j}.
  Reply answer(const std::string& id, const nlohmann::json& body);
  Reply result(const std::string& id);

  /// Quits every session idle for longer than the TTL; returns how many.
  std::size_t expire_idle();
  std::size_t num_sessions() const;

 private:
  struct DatasetEntry {
    std::shared_ptr<const Dataset> data;
    std::optional<RawTable> raw;
  };
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    std::mutex mutex;
    std::string id;
    std::string dataset;
    Session session;
    std::chrono::steady_clock::time_point last_active;
  };

  std::chrono::steady_clock::time_point now() const;
  std::shared_ptr<Entry> find(const std::string& id) const;
  // Both expect the entry lock to be held.
  void expire_if_idle(Entry& e);
  nlohmann::json state_of(Entry& e) const;
  nlohmann::json wire_question(Entry& e) const;
  nlohmann::json wire_result(const Entry& e) const;
  std::string new_id();

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, DatasetEntry> datasets_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::map<std::string, Reply> idempotent_;
  Rng rng_;
};

/// Routes: POST /sessions, GET /sessions/{id}/question,
/// POST /sessions/{id}/answer, GET /sessions/{id}/result, GET /datasets.
/// Files under `static_dir` are served at / when it is not empty.
void mount(httplib::Server& server, SessionService& service, const std::string& static_dir = "");

}  // namespace hdpref::api

#endif  // HDPREF_API_HPP
