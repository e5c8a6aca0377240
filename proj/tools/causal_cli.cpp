// causal_cli: record pong episodes, train and evaluate the detector neuron,
// run the parameter search and export CSV views of the results.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "causal/encoder.hpp"
#include "causal/errors.hpp"
#include "causal/experiment.hpp"
#include "causal/ga.hpp"
#include "causal/kv_config.hpp"
#include "causal/metrics.hpp"
#include "causal/record.hpp"
#include "causal/snapshot.hpp"

namespace {

using namespace causal;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

constexpr const char* kCsvHelp = R"(CSV outputs:
  train --series     start_s,firing_hz,stability,sum_abs_dw
                     one row per 10 s window (firing frequency in Hz, stability
                     at window end, sum of |dw| over the window)
  train --resources  section,index,channel,resource,weight
                     one row per synapse, grouped by encoder section
  ga --out           generation,best_R,mean_R,d_H_bar,w_min,w_max,d_s
                     best_R is the best fitness seen so far
  export --out       step,kind,channel
                     kind is spike, reward or punishment; channel is empty
                     for events
Exit codes: 0 success, 2 configuration error, 3 I/O error.)";

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 1;
  double duration_s = 0.0;
  std::string params;
  std::string out;
  double window_s = 600.0;
  bool dump_config = false;
};

KeyValueConfig load_params(const std::string& path) {
  if (path.empty()) return {};
  return KeyValueConfig::load(path);
}

Step seconds_to_steps(double s, const char* what) {
  if (!(s > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  return static_cast<Step>(s * static_cast<double>(kStepsPerSecond) + 0.5);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void check_written(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

// Detector parameters: d_H_bar, w_min, w_max, d_s, t_p.
const std::set<std::string> kDetectorKeys{"d_H_bar", "w_min", "w_max", "d_s", "t_p"};

PlasticityConfig detector_config(const KeyValueConfig& kv) {
  PlasticityConfig cfg;
  cfg.d_bar = kv.get_double("d_H_bar", cfg.d_bar);
  cfg.w_min = kv.get_double("w_min", cfg.w_min);
  cfg.w_max = kv.get_double("w_max", cfg.w_max);
  cfg.d_s = kv.get_double("d_s", cfg.d_s);
  cfg.t_p = kv.get_int("t_p", cfg.t_p);
  cfg.validate();
  return cfg;
}

void dump_detector(KeyValueConfig& kv, const PlasticityConfig& cfg) {
  kv.set("d_H_bar", cfg.d_bar);
  kv.set("w_min", cfg.w_min);
  kv.set("w_max", cfg.w_max);
  kv.set("d_s", cfg.d_s);
  kv.set("t_p", static_cast<std::int64_t>(cfg.t_p));
}

// Recording parameters.
const std::set<std::string> kRecordKeys{"racket_speed", "racket_period", "clock", "layout"};

PongRecordOptions record_options(const KeyValueConfig& kv) {
  PongRecordOptions o;
  o.racket.speed = kv.get_double("racket_speed", o.racket.speed);
  o.racket.policy_period = kv.get_int("racket_period", o.racket.policy_period);
  const std::string clock = kv.get("clock", "shared");
  if (clock == "shared") {
    o.clock = ClockMode::Shared;
  } else if (clock == "bernoulli") {
    o.clock = ClockMode::Bernoulli;
  } else {
    throw ConfigError("clock must be shared or bernoulli, got '" + clock + "'");
  }
  if (kv.has("layout")) o.layout = load_layout(kv.get("layout"));
  o.racket.validate();
  return o;
}

void dump_record(KeyValueConfig& kv) {
  const PongRecordOptions o;
  kv.set("racket_speed", o.racket.speed);
  kv.set("racket_period", static_cast<std::int64_t>(o.racket.policy_period));
  kv.set("clock", std::string("shared"));
}

int cmd_record(const Common& c) {
  const auto kv = load_params(c.params);
  kv.reject_unknown(kRecordKeys);
  if (c.dump_config) {
    KeyValueConfig d;
    dump_record(d);
    d.write(std::cout);
    return kExitOk;
  }
  if (c.out.empty()) throw ConfigError("record: --out is required");
  auto o = record_options(kv);
  o.seed = c.seed;
  o.duration_steps = seconds_to_steps(c.duration_s > 0 ? c.duration_s : 2000.0, "--duration");
  const auto rec = record_pong(o);
  save_record(c.out, rec);
  std::printf("steps %lld rewards %zu punishments %zu\n", static_cast<long long>(rec.duration()),
              rec.reward_steps().size(), rec.punishment_steps().size());
  return kExitOk;
}

int cmd_train(const Common& c, const std::string& record_path, const std::string& series_path,
              const std::string& resources_path, bool freeze_window) {
  auto kv = load_params(c.params);
  auto known = kDetectorKeys;
  known.insert("series_window_s");
  kv.reject_unknown(known);
  if (c.dump_config) {
    KeyValueConfig d;
    dump_detector(d, PlasticityConfig{});
    d.set("series_window_s", 10.0);
    d.write(std::cout);
    return kExitOk;
  }
  if (c.out.empty()) throw ConfigError("train: --out is required");
  const auto cfg = detector_config(kv);
  const auto rec = load_record(record_path);
  const Step window = seconds_to_steps(c.window_s, "--window");
  const Step end = rec.duration();
  const Step start = std::max<Step>(0, end - window);

  ReplayOptions opts;
  opts.series_window = seconds_to_steps(kv.get_double("series_window_s", 10.0), "series_window_s");
  if (freeze_window) opts.freeze_from = start;
  Detector detector(rec.channels(), cfg);
  auto report = replay(detector, rec, 0, end, opts);
  score_window(report, rec, cfg.t_p, start, end);
  save_snapshot(c.out, detector);

  if (!series_path.empty()) {
    auto out = open_out(series_path);
    write_series_csv(out, report);
    check_written(out, series_path);
  }
  if (!resources_path.empty()) {
    auto out = open_out(resources_path);
    write_resources_csv(out, detector);
    check_written(out, resources_path);
  }
  std::printf("fires %zu rewards %llu tss %llu stability %.6g\n", report.fire_steps.size(),
              static_cast<unsigned long long>(report.reward_count),
              static_cast<unsigned long long>(detector.state().tss_count), detector.stability());
  if (report.r) {
    std::printf("R %.6f over [%g s, %g s)\n", *report.r,
                static_cast<double>(start) / kStepsPerSecond,
                static_cast<double>(end) / kStepsPerSecond);
  } else {
    std::printf("R undefined (no rewards in the window)\n");
  }
  return kExitOk;
}

int cmd_eval(const Common& c, const std::string& record_path, const std::string& snapshot_path) {
  if (c.dump_config) {
    std::cout << "# eval takes no parameters; plasticity is frozen\n";
    return kExitOk;
  }
  const auto rec = load_record(record_path);
  const auto detector = load_snapshot(snapshot_path);
  const Step window = seconds_to_steps(c.window_s, "--window");
  const Step end = rec.duration();
  const Step start = std::max<Step>(0, end - window);
  try {
    const double r = evaluate_frozen(detector, rec, start, end);
    std::printf("R %.6f over [%g s, %g s)\n", r, static_cast<double>(start) / kStepsPerSecond,
                static_cast<double>(end) / kStepsPerSecond);
  } catch (const UndefinedMetricError& e) {
    throw ConfigError(std::string("evaluation window: ") + e.what());
  }
  return kExitOk;
}

const std::set<std::string> kGaKeys{"population",     "elitism",   "mutation", "stagnation",
                                    "max_generations", "tournament", "threads", "t_p"};

int cmd_ga(const Common& c, const std::string& record_path) {
  const auto kv = load_params(c.params);
  kv.reject_unknown(kGaKeys);
  GaConfig cfg;
  if (c.dump_config) {
    KeyValueConfig d;
    d.set("population", static_cast<std::int64_t>(cfg.population_size));
    d.set("elitism", cfg.elitism_fraction);
    d.set("mutation", cfg.mutation_prob);
    d.set("stagnation", static_cast<std::int64_t>(cfg.stagnation_generations));
    d.set("max_generations", static_cast<std::int64_t>(cfg.max_generations));
    d.set("tournament", static_cast<std::int64_t>(cfg.tournament_size));
    d.set("threads", static_cast<std::int64_t>(cfg.threads));
    d.set("t_p", static_cast<std::int64_t>(cfg.t_p));
    d.write(std::cout);
    return kExitOk;
  }
  if (c.out.empty()) throw ConfigError("ga: --out is required");
  cfg.population_size = kv.get_uint("population", cfg.population_size);
  cfg.elitism_fraction = kv.get_double("elitism", cfg.elitism_fraction);
  cfg.mutation_prob = kv.get_double("mutation", cfg.mutation_prob);
  cfg.stagnation_generations = kv.get_uint("stagnation", cfg.stagnation_generations);
  cfg.max_generations = kv.get_uint("max_generations", cfg.max_generations);
  cfg.tournament_size = kv.get_uint("tournament", cfg.tournament_size);
  cfg.threads = static_cast<unsigned>(kv.get_uint("threads", cfg.threads));
  cfg.t_p = kv.get_int("t_p", cfg.t_p);
  cfg.seed = c.seed;
  cfg.eval_window = seconds_to_steps(c.window_s, "--window");
  cfg.validate();

  const auto rec = load_record(record_path);
  const auto result = run_ga(cfg, rec);
  auto out = open_out(c.out);
  write_history_csv(out, result.history);
  check_written(out, c.out);
  std::printf("best R %.6f d_H_bar %s w_min %s w_max %s d_s %s\n", result.best_fitness,
              format_double(result.best.d_H_bar).c_str(),
              format_double(-result.best.neg_w_min).c_str(),
              format_double(result.best.w_max).c_str(), format_double(result.best.d_s).c_str());
  return kExitOk;
}

const std::set<std::string> kSyntheticKeys{"channels", "causes", "lag", "cause_rate_hz",
                                           "min_cause_gap", "noise_rate_hz"};

int cmd_synthetic(const Common& c) {
  const auto kv = load_params(c.params);
  kv.reject_unknown(kSyntheticKeys);
  SyntheticConfig cfg;
  if (c.dump_config) {
    KeyValueConfig d;
    d.set("channels", static_cast<std::int64_t>(cfg.channels));
    std::string causes;
    for (const Channel ch : cfg.causes) causes += (causes.empty() ? "" : ",") + std::to_string(ch);
    d.set("causes", causes);
    d.set("lag", static_cast<std::int64_t>(cfg.lag));
    d.set("cause_rate_hz", cfg.cause_rate_hz);
    d.set("min_cause_gap", static_cast<std::int64_t>(cfg.min_cause_gap));
    d.set("noise_rate_hz", cfg.noise_rate_hz);
    d.write(std::cout);
    return kExitOk;
  }
  if (c.out.empty()) throw ConfigError("synthetic: --out is required");
  cfg.channels = kv.get_uint("channels", cfg.channels);
  if (kv.has("causes")) {
    cfg.causes.clear();
    for (const double v : kv.get_doubles("causes")) {
      if (v < 0 || v != static_cast<double>(static_cast<Channel>(v))) {
        throw ConfigError("causes: not a channel index");
      }
      cfg.causes.push_back(static_cast<Channel>(v));
    }
  }
  cfg.lag = kv.get_int("lag", cfg.lag);
  cfg.cause_rate_hz = kv.get_double("cause_rate_hz", cfg.cause_rate_hz);
  cfg.min_cause_gap = kv.get_int("min_cause_gap", cfg.min_cause_gap);
  cfg.noise_rate_hz = kv.get_double("noise_rate_hz", cfg.noise_rate_hz);
  cfg.seed = c.seed;
  cfg.duration_steps = seconds_to_steps(c.duration_s > 0 ? c.duration_s : 300.0, "--duration");
  const auto rec = make_synthetic(cfg);
  save_record(c.out, rec);
  std::printf("steps %lld channels %zu rewards %zu\n", static_cast<long long>(rec.duration()),
              rec.channels(), rec.reward_steps().size());
  return kExitOk;
}

int cmd_export(const Common& c, const std::string& record_path) {
  if (c.dump_config) {
    std::cout << "# export takes no parameters\n";
    return kExitOk;
  }
  const auto rec = load_record(record_path);
  if (c.out.empty() || c.out == "-") {
    export_record_csv(std::cout, rec);
    return kExitOk;
  }
  auto out = open_out(c.out);
  export_record_csv(out, rec);
  check_written(out, c.out);
  return kExitOk;
}

int cmd_calibrate(const Common& c) {
  const auto kv = load_params(c.params);
  kv.reject_unknown({"racket_speed", "racket_period"});
  if (c.dump_config) {
    KeyValueConfig d;
    const RacketDynamics r;
    d.set("racket_speed", r.speed);
    d.set("racket_period", static_cast<std::int64_t>(r.policy_period));
    d.write(std::cout);
    return kExitOk;
  }
  RacketDynamics racket;
  racket.speed = kv.get_double("racket_speed", racket.speed);
  racket.policy_period = kv.get_int("racket_period", racket.policy_period);
  const auto layout =
      calibrate_layout(c.seed, seconds_to_steps(c.duration_s > 0 ? c.duration_s : 1000.0, "--duration"),
                       racket);
  if (c.out.empty() || c.out == "-") {
    write_layout(std::cout, layout);
  } else {
    save_layout(c.out, layout);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal-link detector neuron on a spiking pong task", "causal_cli"};
  app.footer(kCsvHelp);
  app.require_subcommand(1);

  Common common;
  std::string record_path, snapshot_path, series_path, resources_path;
  bool freeze_window = false;

  const auto add_common = [&](CLI::App* sub, bool duration, bool window) {
    sub->add_option("--seed", common.seed, "Master seed")->capture_default_str();
    if (duration) sub->add_option("--duration", common.duration_s, "Simulated seconds");
    sub->add_option("--params", common.params, "key = value parameter file");
    sub->add_option("--out", common.out, "Output path");
    if (window) {
      sub->add_option("--window", common.window_s, "Evaluation window, last N seconds")
          ->capture_default_str();
    }
    sub->add_flag("--dump-config", common.dump_config, "Print the parameter defaults and exit");
  };

  auto* rec = app.add_subcommand("record", "Record a chaotic-racket pong episode (default 2000 s)");
  add_common(rec, true, false);

  auto* train = app.add_subcommand("train", "Train a fresh detector on a record; --out is the snapshot");
  add_common(train, false, true);
  train->add_option("record", record_path, "Record file")->required();
  train->add_option("--series", series_path, "Per-window time series CSV");
  train->add_option("--resources", resources_path, "Per-synapse resource CSV");
  train->add_flag("--freeze-window", freeze_window,
                  "Freeze plasticity over the evaluation window");

  auto* eval = app.add_subcommand("eval", "Frozen-plasticity R of a snapshot over the last --window seconds");
  add_common(eval, false, true);
  eval->add_option("record", record_path, "Record file")->required();
  eval->add_option("snapshot", snapshot_path, "Detector snapshot")->required();

  auto* ga = app.add_subcommand("ga", "Genetic search of detector parameters; --out is the history CSV");
  add_common(ga, false, true);
  ga->add_option("record", record_path, "Record file")->required();

  auto* syn = app.add_subcommand("synthetic", "Generate a ground-truth causal record (default 300 s)");
  add_common(syn, true, false);

  auto* exp = app.add_subcommand("export", "Dump a record as CSV (stdout when --out is omitted)");
  add_common(exp, false, false);
  exp->add_option("record", record_path, "Record file")->required();

  auto* cal = app.add_subcommand("calibrate", "Fit velocity bin boundaries (default 1000 s run)");
  add_common(cal, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*rec) return cmd_record(common);
    if (*train) return cmd_train(common, record_path, series_path, resources_path, freeze_window);
    if (*eval) return cmd_eval(common, record_path, snapshot_path);
    if (*ga) return cmd_ga(common, record_path);
    if (*syn) return cmd_synthetic(common);
    if (*exp) return cmd_export(common, record_path);
    if (*cal) return cmd_calibrate(common);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const StructuralError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
