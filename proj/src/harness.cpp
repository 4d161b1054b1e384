#include "hdpref/harness.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace hdpref {

Dataset gen_uniform(Index n, Index d, Rng& rng) {
  if (n < 1 || d < 1) throw std::invalid_argument("gen_uniform: n and d must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RowMatrix v(n, d);
  // 1 - U[0,1) lies in (0, 1].
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) v(i, j) = 1.0 - unit(rng);
  }
  for (Index j = 0; j < d; ++j) v.col(j) /= v.col(j).maxCoeff();
  return Dataset(std::move(v));
}

const char* to_string(TrialMode mode) { return mode == TrialMode::favorite ? "p1" : "p2"; }

TrialMode trial_mode_from_string(const std::string& s) {
  if (s == "p1") return TrialMode::favorite;
  if (s == "p2") return TrialMode::regret_set;
  throw std::invalid_argument("unknown mode: " + s + " (expected p1 or p2)");
}

void TrialConfig::validate() const {
  if (reps < 1) throw std::invalid_argument("trials: reps must be positive");
  if (mode == TrialMode::regret_set && q < 1) throw std::invalid_argument("trials: q must be positive");
  if (csv_path.empty() && (n < 1 || d < 1)) throw std::invalid_argument("trials: n and d must be positive");
  if (d_int < 1) throw std::invalid_argument("trials: d_int must be positive");
  if (threads < 1) throw std::invalid_argument("trials: threads must be positive");
  session.validate();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 over the pair
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Dataset trial_dataset(const TrialConfig& cfg) {
  if (!cfg.csv_path.empty()) return skyline(load_table(read_csv_file(cfg.csv_path)));
  Rng rng(derive_seed(cfg.seed, 0xda7a));
  return skyline(gen_uniform(cfg.n, cfg.d, rng));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

TrialOutcome run_one(const std::shared_ptr<const Dataset>& data, const TrialConfig& cfg, Index rep) {
  const Dataset& X = *data;
  TrialOutcome out;
  out.rep = rep;
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(rep) + 1));
  const SimulatedUser user{gen_sparse_utility(X.dims(), cfg.d_int, rng, cfg.session.d_max)};
  SessionConfig scfg = cfg.session;
  scfg.seed = rng();

  const auto start = Clock::now();
  Session session(data, scfg);
  while (!session.terminal()) {
    if (cfg.mode == TrialMode::regret_set && session.questions_answered() >= cfg.q) {
      session.submit(Answer::quit());
      break;
    }
    const Question& q = session.current_question();
    session.submit(user.answer(q.shown, displayed_tuples(X, q)));
  }
  out.seconds = seconds_since(start);

  const SessionResult& res = session.result();
  out.kind = res.kind;
  out.questions = res.questions_asked;
  std::vector<Index> returned =
      res.kind == ResultKind::favorite ? std::vector<Index>{res.favorite} : res.regret_set;
  out.result_size = static_cast<Index>(returned.size());
  out.regret = regret_ratio(X, returned, user.truth);

  const Vector utilities = X.values() * user.truth.weights();
  if (res.kind == ResultKind::favorite) out.found_favorite = utilities(res.favorite) >= utilities.maxCoeff();
  out.keys_recovered = res.identified_keys.sorted() == user.truth.support();

  for (const auto& entry : session.log()) {
    if (entry.answer.kind == Answer::Kind::quit) continue;
    if (entry.phase == Phase::coarse) ++out.coarse_questions;
    if (entry.phase == Phase::fine) ++out.fine_questions;
    if (entry.phase == Phase::search) ++out.search_questions;
  }
  if (session.coarse_state().done()) out.fine_candidates = session.coarse_state().kept().size();
  out.group_sizes = session.fine_state().group_sizes();
  out.requested_group_sizes = session.fine_state().requested_group_sizes();

  // Baseline: a uniformly random set of the same size.
  const auto base_start = Clock::now();
  const auto base = sample_without_replacement(X.size(), std::min(cfg.session.subset.K, X.size()), rng);
  out.baseline_regret = regret_ratio(X, base, user.truth);
  out.baseline_seconds = seconds_since(base_start);
  out.outperformed = out.regret < out.baseline_regret ||
                     (out.regret == out.baseline_regret && out.seconds < out.baseline_seconds);
  return out;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) ;
  return v[std::min(v.size() - 1, idx == 0 ? 0 : idx - 1)];
}

}  // namespace

TrialOutcome run_trial(const Dataset& data, const TrialConfig& cfg, Index rep) {
  return run_one(std::make_shared<const Dataset>(data), cfg, rep);
}

Metrics summarize(const TrialConfig& cfg, Index K, std::vector<TrialOutcome> outcomes) {
  std::sort(outcomes.begin(), outcomes.end(), [](const auto& a, const auto& b) { return a.rep < b.rep; });
  Metrics m;
  m.mode = cfg.mode;
  m.n = cfg.n;
  m.d = cfg.d;
  m.d_int = cfg.d_int;
  m.q = cfg.mode == TrialMode::regret_set ? cfg.q : 0;
  m.K = K;
  m.reps = static_cast<Index>(outcomes.size());
  if (outcomes.empty()) return m;
  std::vector<double> times;
  for (const auto& o : outcomes) {
    times.push_back(o.seconds);
    m.mean_seconds += o.seconds;
    m.mean_regret += o.regret;
    m.mean_questions += static_cast<double>(o.questions);
    m.outperformance_rate += o.outperformed ? 1.0 : 0.0;
    m.success_rate += o.found_favorite ? 1.0 : 0.0;
    m.key_recovery_rate += o.keys_recovered ? 1.0 : 0.0;
  }
  const auto count = static_cast<double>(outcomes.size());
  m.mean_seconds /= count;
  m.mean_regret /= count;
  m.mean_questions /= count;
  m.outperformance_rate /= count;
  m.success_rate /= count;
  m.key_recovery_rate /= count;
  m.p50_seconds = percentile(times, 0.5);
  m.p95_seconds = percentile(times, 0.95);
  return m;
}

TrialReport run_trials(const std::shared_ptr<const Dataset>& data, const TrialConfig& cfg) {
  cfg.validate();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.reps));
  const Index workers = std::min(cfg.threads, cfg.reps);
  if (workers <= 1) {
    for (Index r = 0; r < cfg.reps; ++r) outcomes[static_cast<std::size_t>(r)] = run_one(data, cfg, r);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (Index w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (Index r = w; r < cfg.reps; r += workers) outcomes[static_cast<std::size_t>(r)] = run_one(data, cfg, r);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  TrialConfig shape = cfg;
  shape.n = data->size();
  shape.d = data->dims();
  TrialReport report;
  report.metrics = summarize(shape, std::min(cfg.session.subset.K, data->size()), outcomes);
  report.outcomes = std::move(outcomes);
  return report;
}

TrialReport run_trials(const TrialConfig& cfg) {
  cfg.validate();
  return run_trials(std::make_shared<const Dataset>(trial_dataset(cfg)), cfg);
}

namespace {

const std::vector<std::string> kColumns = {"mode",          "n",           "d",
                                           "d_int",         "q",           "K",
                                           "reps",          "mean_regret", "mean_questions",
                                           "outperformance_rate", "success_rate", "key_recovery_rate"};
const std::vector<std::string> kTimingColumns = {"mean_seconds", "p50_seconds", "p95_seconds"};

}  // namespace

void emit_report_csv(std::ostream& out, const std::vector<Metrics>& rows, bool timing) {
  auto cols = kColumns;
  if (timing) cols.insert(cols.end(), kTimingColumns.begin(), kTimingColumns.end());
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& m : rows) {
    line.str({});
    line << to_string(m.mode) << ',' << m.n << ',' << m.d << ',' << m.d_int << ',' << m.q << ',' << m.K << ','
         << m.reps << ',' << m.mean_regret << ',' << m.mean_questions << ',' << m.outperformance_rate << ','
         << m.success_rate << ',' << m.key_recovery_rate;
    if (timing) line << ',' << m.mean_seconds << ',' << m.p50_seconds << ',' << m.p95_seconds;
    out << line.str() << '\n';
  }
}

void emit_report_text(std::ostream& out, const std::vector<Metrics>& rows, bool timing) {
  for (const auto& m : rows) {
    out << (m.mode == TrialMode::favorite ? "favorite search" : "early stop, K-set") << ": n=" << m.n
        << " d=" << m.d << " d_int=" << m.d_int;
    if (m.mode == TrialMode::regret_set) out << " q=" << m.q << " K=" << m.K;
    out << " reps=" << m.reps << '\n';
    out << std::fixed << std::setprecision(4);
    out << "  mean regret ratio      " << m.mean_regret << '\n';
    out << "  mean questions         " << m.mean_questions << '\n';
    out << "  outperformance rate    " << m.outperformance_rate << "  (baseline: uniform random K-set)\n";
    if (m.mode == TrialMode::favorite) out << "  favorite found         " << m.success_rate << '\n';
    out << "  keys recovered         " << m.key_recovery_rate << '\n';
    if (timing) {
      out << "  seconds mean/p50/p95   " << m.mean_seconds << " / " << m.p50_seconds << " / " << m.p95_seconds
          << '\n';
    }
    out << std::defaultfloat;
  }
}

std::vector<Metrics> parse_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("report: empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::vector<Metrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw std::invalid_argument("report: ragged row");
    Metrics m;
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto& h = header[i];
      const auto& c = cells[i];
      if (h == "mode") m.mode = trial_mode_from_string(c);
      else if (h == "n") m.n = std::stoll(c);
      else if (h == "d") m.d = std::stoll(c);
      else if (h == "d_int") m.d_int = std::stoll(c);
      else if (h == "q") m.q = std::stoll(c);
      else if (h == "K") m.K = std::stoll(c);
      else if (h == "reps") m.reps = std::stoll(c);
      else if (h == "mean_regret") m.mean_regret = std::stod(c);
      else if (h == "mean_questions") m.mean_questions = std::stod(c);
      else if (h == "outperformance_rate") m.outperformance_rate = std::stod(c);
      else if (h == "success_rate") m.success_rate = std::stod(c);
      else if (h == "key_recovery_rate") m.key_recovery_rate = std::stod(c);
      else if (h == "mean_seconds") m.mean_seconds = std::stod(c);
      else if (h == "p50_seconds") m.p50_seconds = std::stod(c);
      else if (h == "p95_seconds") m.p95_seconds = std::stod(c);
      else throw std::invalid_argument("report: unknown column " + h);
    }
    rows.push_back(m);
  }
  return rows;
}

}  // namespace hdpref
