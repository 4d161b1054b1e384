// Command-line front end: synthetic data, simulated-user trials, the HTTP
// service and the coverage calculator.

#include "hdpref/api.hpp"
#include "hdpref/harness.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace hdpref;

namespace {

int cmd_gen(Index n, Index d, std::uint64_t seed, const std::string& out_path) {
  Rng rng(seed);
  const Dataset X = gen_uniform(n, d, rng);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  write_csv(out, X);
  std::cerr << "wrote " << n << " x " << d << " to " << out_path << '\n';
  return 0;
}

struct SimulateArgs {
  std::string dataset;
  std::vector<Index> d_int{3};
  std::vector<Index> q{15};
  std::vector<Index> K{30};
  std::vector<Index> d{100};
  Index n = 10000;
  std::string mode = "p1";
  Index reps = 100;
  std::uint64_t seed = 1;
  std::string report;
  Index threads = 1;
  bool no_timing = false;
  SessionConfig session;
};

int cmd_simulate(const SimulateArgs& a) {
  TrialConfig base;
  base.mode = trial_mode_from_string(a.mode);
  base.n = a.n;
  base.reps = a.reps;
  base.seed = a.seed;
  base.csv_path = a.dataset;
  base.threads = a.threads;
  base.session = a.session;

  std::vector<Metrics> rows;
  // A CSV dataset fixes d; the d grid only applies to synthetic data.
  const std::vector<Index> d_grid = a.dataset.empty() ? a.d : std::vector<Index>{0};
  const std::vector<Index> q_grid = base.mode == TrialMode::regret_set ? a.q : std::vector<Index>{0};
  for (Index d : d_grid) {
    TrialConfig cfg = base;
    cfg.d = d;
    auto data = std::make_shared<const Dataset>(trial_dataset(cfg));
    for (Index d_int : a.d_int) {
      for (Index q : q_grid) {
        for (Index K : a.K) {
          cfg.d_int = d_int;
          cfg.q = q;
          cfg.session.subset.K = K;
          rows.push_back(run_trials(data, cfg).metrics);
          emit_report_text(std::cout, {rows.back()}, !a.no_timing);
        }
      }
    }
  }
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw std::runtime_error("cannot write " + a.report);
    emit_report_csv(out, rows, !a.no_timing);
  }
  return 0;
}

int cmd_serve(const std::vector<std::string>& paths, const std::string& host, int port,
              const std::string& static_dir, Index ttl, double delta) {
  api::ServiceOptions options;
  options.ttl = std::chrono::seconds(ttl);
  api::SessionService service(options);
  for (const auto& path : paths) {
    RawTable raw = read_csv_file(path);
    auto data = std::make_shared<const Dataset>(skyline(load_table(raw, delta)));
    const std::string name = std::filesystem::path(path).stem().string();
    service.register_dataset(name, data, std::move(raw));
    std::cerr << "dataset " << name << ": " << data->size() << " skyline rows, " << data->dims() << " attributes\n";
  }
  httplib::Server server;
  api::mount(server, service, static_dir);
  std::cerr << "listening on " << host << ':' << port << '\n';
  if (!server.listen(host, port)) throw std::runtime_error("cannot listen on port " + std::to_string(port));
  return 0;
}

int cmd_coverage(Index cand, Index d_int, Index w, std::optional<double> conf, Index rounds) {
  const auto cover = coverage_probability(cand, d_int, w);
  std::cout << std::setprecision(10);
  std::cout << "p_cover      " << cover.p << '\n';
  std::cout << "lower_bound  " << cover.bound << '\n';
  std::cout << "confidence after " << rounds << " rounds  " << coverage_confidence(cover.p, rounds) << '\n';
  if (conf) std::cout << "rounds for confidence " << *conf << "  " << rounds_for_confidence(cover.p, *conf) << '\n';
  return 0;
}

void add_session_options(CLI::App& app, SessionConfig& s) {
  app.add_option("--m", s.m, "attributes shown per question")->capture_default_str();
  app.add_option("--s", s.s, "tuples shown per question")->capture_default_str();
  app.add_option("--dmax", s.d_max, "assumed bound on key attributes")->capture_default_str();
  app.add_option("--w", s.subset.w, "attributes sampled per subset round")->capture_default_str();
  app.add_option("--k", s.subset.k, "rows kept per subset round")->capture_default_str();
  app.add_option("--max-iter", s.subset.max_iter, "subset round cap")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-utility preference elicitation"};
  app.set_config("--config", "", "TOML/INI file with option values; flags override it");
  app.require_subcommand(1);

  Index gen_n = 10000, gen_d = 100;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "write a uniform synthetic dataset as CSV");
  gen->add_option("--n", gen_n)->capture_default_str();
  gen->add_option("--d", gen_d)->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out)->required();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run simulated-user trials and report metrics");
  simulate->add_option("--dataset", sim.dataset, "CSV file; synthetic uniform data when omitted");
  simulate->add_option("--mode", sim.mode, "p1: favorite search, p2: stop after q questions")
      ->check(CLI::IsMember({"p1", "p2"}))
      ->capture_default_str();
  simulate->add_option("--dint", sim.d_int, "key attributes of the simulated user (list)")->capture_default_str();
  simulate->add_option("--q", sim.q, "questions before quitting in p2 (list)")->capture_default_str();
  simulate->add_option("--K", sim.K, "output size in p2 (list)")->capture_default_str();
  simulate->add_option("--n", sim.n, "synthetic rows")->capture_default_str();
  simulate->add_option("--d", sim.d, "synthetic attributes (list)")->capture_default_str();
  simulate->add_option("--reps", sim.reps)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--report", sim.report, "CSV output path");
  simulate->add_option("--threads", sim.threads)->capture_default_str();
  simulate->add_flag("--no-timing", sim.no_timing, "omit wall-clock columns so reports are reproducible");
  add_session_options(*simulate, sim.session);

  std::vector<std::string> serve_paths;
  std::string serve_host = "127.0.0.1", serve_static;
  int serve_port = 8080;
  Index serve_ttl = 3600;
  double serve_delta = 0.01;
  auto* serve = app.add_subcommand("serve", "start the HTTP/JSON session service");
  serve->add_option("--dataset", serve_paths, "CSV files, registered under their file stem")->required();
  serve->add_option("--port", serve_port)->capture_default_str();
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--static", serve_static, "directory served at /");
  serve->add_option("--ttl", serve_ttl, "idle seconds before a session is quit")->capture_default_str();
  serve->add_option("--delta", serve_delta, "normalization offset fraction")->capture_default_str();

  Index cov_cand = 0, cov_dint = 3, cov_w = 6, cov_rounds = 1;
  std::optional<double> cov_conf;
  auto* coverage = app.add_subcommand("coverage", "probability that a sampled attribute set holds every key");
  coverage->add_option("--cand", cov_cand)->required();
  coverage->add_option("--dint", cov_dint)->capture_default_str();
  coverage->add_option("--w", cov_w)->capture_default_str();
  coverage->add_option("--conf", cov_conf, "target confidence");
  coverage->add_option("--rounds", cov_rounds)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(gen_n, gen_d, gen_seed, gen_out);
    if (*simulate) {
      // k follows w unless given.
      if (simulate->count("--w") && !simulate->count("--k")) sim.session.subset.k = sim.session.subset.w + 1;
      return cmd_simulate(sim);
    }
    if (*serve) return cmd_serve(serve_paths, serve_host, serve_port, serve_static, serve_ttl, serve_delta);
    if (*coverage) return cmd_coverage(cov_cand, cov_dint, cov_w, cov_conf, cov_rounds);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
