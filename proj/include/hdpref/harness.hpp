#ifndef HDPREF_HARNESS_HPP
#define HDPREF_HARNESS_HPP

// Simulated-user experiments: synthetic data, repeated sessions against
// random sparse utilities, and the CSV/text reports they produce.

#include "hdpref/session.hpp"

#include <iosfwd>
#include <string>

namespace hdpref {

/// Uniform values on (0,1], each column rescaled so its maximum is 1.
Dataset gen_uniform(Index n, Index d, Rng& rng);

enum class TrialMode { favorite, regret_set };
const char* to_string(TrialMode mode);
TrialMode trial_mode_from_string(const std::string& s);

struct TrialConfig {
  TrialMode mode = TrialMode::favorite;
  Index n = 10000;
  Index d = 100;
  Index d_int = 3;
  Index q = 15;  ///< answers before quitting; ignored in favorite mode
  Index reps = 100;
  std::uint64_t seed = 1;
  std::string csv_path;  ///< synthetic data when empty
  SessionConfig session;
  Index threads = 1;

  void validate() const;
};

/// Per-repetition record, kept so callers can check per-run properties.
struct TrialOutcome {
  Index rep = 0;
  double seconds = 0.0;
  double regret = 0.0;
  double baseline_regret = 0.0;
  double baseline_seconds = 0.0;
  bool outperformed = false;
  bool found_favorite = false;  ///< returned row maximizes the true utility
  bool keys_recovered = false;  ///< identified keys equal the true support
  Index questions = 0;
  Index coarse_questions = 0;
  Index fine_questions = 0;
  Index search_questions = 0;
  Index fine_candidates = 0;  ///< candidate attributes entering group testing
  std::vector<Index> group_sizes;            ///< as displayed
  std::vector<Index> requested_group_sizes;  ///< 2^α before the display cap
  ResultKind kind = ResultKind::favorite;
  Index result_size = 0;
};

struct Metrics {
  TrialMode mode = TrialMode::favorite;
  Index n = 0;
  Index d = 0;
  Index d_int = 0;
  Index q = 0;
  Index K = 0;
  Index reps = 0;
  double mean_seconds = 0.0;
  double p50_seconds = 0.0;
  double p95_seconds = 0.0;
  double mean_regret = 0.0;
  double mean_questions = 0.0;
  double outperformance_rate = 0.0;
  double success_rate = 0.0;
  double key_recovery_rate = 0.0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct TrialReport {
  Metrics metrics;
  std::vector<TrialOutcome> outcomes;
};

/// Loads or generates the dataset the trials run on (skyline-filtered).
Dataset trial_dataset(const TrialConfig& cfg);

/// Runs one repetition on `data`.
TrialOutcome run_trial(const Dataset& data, const TrialConfig& cfg, Index rep);
TrialReport run_trials(const TrialConfig& cfg);
TrialReport run_trials(const std::shared_ptr<const Dataset>& data, const TrialConfig& cfg);

Metrics summarize(const TrialConfig& cfg, Index K, std::vector<TrialOutcome> outcomes);

/// CSV with one row per metrics record; `timing` controls the wall-clock columns.
void emit_report_csv(std::ostream& out, const std::vector<Metrics>& rows, bool timing = true);
void emit_report_text(std::ostream& out, const std::vector<Metrics>& rows, bool timing = true);
std::vector<Metrics> parse_report_csv(std::istream& in);

/// Seed for repetition `rep` derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace hdpref

#endif  // HDPREF_HARNESS_HPP
