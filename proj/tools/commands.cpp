// Copyright 2026 The BankFair Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "bankfair/synthetic.hpp"

namespace bankfair::cli {

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = ".";
  int jobs = 1;
};

struct RunOptions {
  DatasetPaths paths;
  std::string policy = "bankfair_plus";
  std::vector<std::string> overrides;  // key=value
  std::optional<double> lambda;
  std::optional<double> delta;
  std::optional<Index> K;
};

void add_dataset_options(CLI::App* cmd, DatasetPaths& paths) {
  cmd->add_option("--scores", paths.scores, "user_id,item_id,score file")->required();
  cmd->add_option("--catalog", paths.catalog, "item_id,provider_id file")->required();
  cmd->add_option("--arrivals", paths.arrivals, "interval,user_id file")->required();
}

void add_run_options(CLI::App* cmd, RunOptions& run) {
  add_dataset_options(cmd, run.paths);
  cmd->add_option("--policy", run.policy,
                  "bankfair_plus | bankfair_linear | topk | greedy_min_exposure");
  cmd->add_option("--set", run.overrides, "override a config field, key=value (repeatable)");
  cmd->add_option("--lambda", run.lambda, "fairness weight");
  cmd->add_option("--delta", run.delta, "regret avoidance");
  cmd->add_option("-K,--K", run.K, "slate length");
}

RunConfig resolve_config(const GlobalOptions& global, const RunOptions* run) {
  RunConfig config;
  if (!global.config_path.empty()) config = RunConfig::from_file(global.config_path);
  if (run) {
    for (const auto& kv : run->overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (run->lambda) config.lambda = *run->lambda;
    if (run->delta) config.delta = *run->delta;
    if (run->K) config.K = *run->K;
  }
  if (global.seed) config.seed = *global.seed;
  config.validate();
  return config;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    RunConfig probe;
    probe.set(what, part);  // reuses the config field parser
    values.push_back(std::string_view(what) == "lambda" ? probe.lambda : probe.delta);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

Dataset load_dataset(const DatasetPaths& paths, const RunConfig& config) {
  return Dataset::assemble(load_scores(paths.scores), load_catalog(paths.catalog),
                           load_arrivals(paths.arrivals), config.merit_mode);
}

void SweepGrid::validate() const {
  if (lambdas.empty() || deltas.empty()) throw ValidationError("sweep: empty lambda or delta list");
  if (repetitions < 1) throw ValidationError("sweep: repetitions must be >= 1");
  for (double l : lambdas) {
    RunConfig c = base;
    c.lambda = l;
    c.validate();
  }
  for (double d : deltas) {
    RunConfig c = base;
    c.delta = d;
    c.validate();
  }
}

std::vector<FrontierRow> run_sweep(const Dataset& dataset, const SweepGrid& grid, Policy policy,
                                   int jobs) {
  grid.validate();
  std::vector<double> lambdas = grid.lambdas;
  std::vector<double> deltas = grid.deltas;
  std::sort(lambdas.begin(), lambdas.end());
  std::sort(deltas.begin(), deltas.end());

  std::vector<FrontierRow> rows;
  for (double l : lambdas) {
    for (double d : deltas) {
      for (Index r = 0; r < grid.repetitions; ++r) rows.push_back({l, d, r, {}});
    }
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(rows.size());
  auto worker = [&] {
    for (std::size_t j = next++; j < rows.size(); j = next++) {
      try {
        RunConfig config = grid.base;
        config.lambda = rows[j].lambda;
        config.delta = rows[j].delta;
        config.seed = grid.base.seed + static_cast<std::uint64_t>(rows[j].repetition);
        rows[j].metrics = run_session(dataset, config, policy).metrics;
      } catch (...) {
        failures[j] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(rows.size(), 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair re-ranking with bankruptcy-planned minimum exposure", "bankfair"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--config", global.config_path, "key = value config file");
  app.add_option("--seed", global.seed, "random seed");
  app.add_option("--out", global.out_dir, "output directory");
  app.add_option("--jobs", global.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);

  SyntheticSpec spec;
  std::string score_dist = "beta-skewed";
  std::string traffic = "sinusoidal";
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  gen->add_option("--users", spec.users);
  gen->add_option("--items", spec.items);
  gen->add_option("--providers", spec.providers);
  gen->add_option("--score-dist", score_dist, "uniform | beta-skewed");
  gen->add_option("--zipf", spec.provider_size_skew, "provider size skew");
  gen->add_option("--quality-spread", spec.quality_spread, "sd of per-provider score offsets");
  gen->add_option("--traffic", traffic, "constant | sinusoidal | bursty");
  gen->add_option("--intervals", spec.intervals);
  gen->add_option("--arrivals", spec.arrivals, "total arrivals (default: one per user)");

  RunOptions sim_opts;
  bool dump_duals = false;
  auto* sim = app.add_subcommand("simulate", "run a session and write its log and metrics");
  add_run_options(sim, sim_opts);
  sim->add_flag("--duals", dump_duals, "also write duals.csv");

  RunOptions sweep_opts;
  std::string lambda_list = "0,0.5,0.9";
  std::string delta_list = "1";
  Index reps = 1;
  auto* sweep = app.add_subcommand("sweep", "run a lambda/delta grid and write frontier.csv");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--lambdas", lambda_list, "comma-separated lambda values");
  sweep->add_option("--deltas", delta_list, "comma-separated delta values");
  sweep->add_option("--reps", reps, "repetitions per point");

  RunOptions alloc_opts;
  auto* alloc = app.add_subcommand("allocate", "write the per-interval exposure plan");
  add_run_options(alloc, alloc_opts);

  RunOptions metric_opts;
  std::filesystem::path log_path;
  auto* metrics = app.add_subcommand("metrics", "recompute metrics from a stored log");
  add_run_options(metrics, metric_opts);
  metrics->add_option("--log", log_path, "log.jsonl from simulate")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    ensure_dir(global.out_dir);
    if (gen->parsed()) {
      if (global.seed) spec.seed = *global.seed;
      spec.score_distribution = parse_score_distribution(score_dist);
      spec.traffic_pattern = parse_traffic_pattern(traffic);
      const SyntheticDataset ds = generate_dataset(spec);
      write_scores(global.out_dir / "scores.csv", ds.store);
      write_catalog(global.out_dir / "catalog.csv", ds.catalog);
      write_arrivals(global.out_dir / "arrivals.csv", ds.schedule);
      out << "wrote " << ds.store.user_count() << " users, " << ds.catalog.item_count()
          << " items, " << ds.catalog.provider_count() << " providers, " << ds.schedule.size()
          << " arrivals to " << global.out_dir.string() << '\n';
    } else if (sim->parsed()) {
      const RunConfig config = resolve_config(global, &sim_opts);
      const Policy policy = parse_policy(sim_opts.policy);
      const Dataset ds = load_dataset(sim_opts.paths, config);
      SessionOptions options;
      options.record_duals = dump_duals;
      const SessionLog log = run_session(ds, config, policy, options);
      write_log(global.out_dir / "log.jsonl", log, ds);
      write_metrics(global.out_dir / "metrics.csv", log.metrics);
      if (dump_duals) {
        auto f = open_out(global.out_dir / "duals.csv");
        write_duals(f, log.duals, ds.catalog);
      }
      write_metrics(out, log.metrics);
    } else if (sweep->parsed()) {
      SweepGrid grid;
      grid.base = resolve_config(global, &sweep_opts);
      grid.lambdas = parse_list(lambda_list, "lambda");
      grid.deltas = parse_list(delta_list, "delta");
      grid.repetitions = reps;
      const Policy policy = parse_policy(sweep_opts.policy);
      const Dataset ds = load_dataset(sweep_opts.paths, grid.base);
      const auto rows = run_sweep(ds, grid, policy, global.jobs);
      auto f = open_out(global.out_dir / "frontier.csv");
      write_frontier(f, rows);
      write_frontier(out, rows);
    } else if (alloc->parsed()) {
      const RunConfig config = resolve_config(global, &alloc_opts);
      const Policy policy = parse_policy(alloc_opts.policy);
      const Dataset ds = load_dataset(alloc_opts.paths, config);
      const SessionLog log = run_session(ds, config, policy);
      auto f = open_out(global.out_dir / "plan.csv");
      write_plans(f, log.plans, ds.catalog);
      write_plans(out, log.plans, ds.catalog);
    } else if (metrics->parsed()) {
      const RunConfig config = resolve_config(global, &metric_opts);
      const Dataset ds = load_dataset(metric_opts.paths, config);
      const std::vector<Decision> decisions = read_log(log_path, ds);
      const MetricsSummary m = evaluate(ds, decisions, fairness_for(ds, config), config.K);
      write_metrics(global.out_dir / "metrics.csv", m);
      write_metrics(out, m);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace bankfair::cli
