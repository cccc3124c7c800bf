#include "netmimo/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "netmimo/rng.hpp"

namespace netmimo {

using json = nlohmann::json;

NetworkConfig ExperimentSpec::config_at(double snr_db) const {
  // Unit noise, so the per-BS power budget is the linear SNR.
  return NetworkConfig::make(dims[0], dims[1], dims[2], dims[3],
                             std::pow(10.0, snr_db / 10.0));
}

void ExperimentSpec::validate() const {
  NetworkConfig::make(dims[0], dims[1], dims[2], dims[3], 1.0); // dims check
  if (trials < 1) {
    throw std::invalid_argument("trials: must be at least 1");
  }
  if (snr_list_db.empty()) {
    throw std::invalid_argument("snr_list_db: must not be empty");
  }
  for (double v : snr_list_db) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("snr_list_db: values must be finite");
    }
  }
  if (!scheme_bd && !scheme_proposed) {
    throw std::invalid_argument("schemes: at least one of bd, proposed required");
  }
  if (jobs < 1) {
    throw std::invalid_argument("jobs: must be at least 1");
  }
}

std::vector<bool> parse_schemes(const std::string& schemes) {
  bool bd = false, proposed = false;
  std::stringstream ss(schemes);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "bd") {
      bd = true;
    } else if (item == "proposed") {
      proposed = true;
    } else if (!item.empty()) {
      throw std::invalid_argument("schemes: unknown scheme '" + item + "'");
    }
  }
  return {bd, proposed};
}

ExperimentSpec parse_config_text(const std::string& text) {
  ExperimentSpec spec;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "dims") {
        const auto v = value.get<std::vector<int>>();
        if (v.size() != 4) {
          throw std::invalid_argument("dims: expected [K_t N_t K_r N_r]");
        }
        std::copy(v.begin(), v.end(), spec.dims.begin());
      } else if (key == "snr_list_db") {
        spec.snr_list_db = value.get<std::vector<double>>();
      } else if (key == "trials") {
        spec.trials = value.get<int>();
      } else if (key == "base_seed") {
        spec.base_seed = value.get<std::uint64_t>();
      } else if (key == "schemes") {
        std::string joined;
        for (const auto& s : value.get<std::vector<std::string>>()) {
          if (!joined.empty()) joined += ',';
          joined += s;
        }
        const auto flags = parse_schemes(joined);
        spec.scheme_bd = flags[0];
        spec.scheme_proposed = flags[1];
      } else if (key == "out") {
        spec.out_path = value.get<std::string>();
      } else if (key == "aggregate") {
        spec.aggregate_path = value.get<std::string>();
      } else if (key == "jobs") {
        spec.jobs = value.get<int>();
      } else if (key == "timing") {
        spec.timing = value.get<bool>();
      } else if (key == "trace_snr_db") {
        spec.trace_snr_db = value.get<double>();
      } else if (key == "trace_seed") {
        spec.trace_seed = value.get<std::uint64_t>();
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    } catch (const json::exception&) {
      throw std::invalid_argument("config: invalid value for key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_overrides(ExperimentSpec& spec, const SpecOverrides& ovr) {
  if (ovr.snr_list_db) spec.snr_list_db = *ovr.snr_list_db;
  if (ovr.trials) spec.trials = *ovr.trials;
  if (ovr.base_seed) spec.base_seed = *ovr.base_seed;
  if (ovr.schemes) {
    const auto flags = parse_schemes(*ovr.schemes);
    spec.scheme_bd = flags[0];
    spec.scheme_proposed = flags[1];
  }
  if (ovr.jobs) spec.jobs = *ovr.jobs;
  if (ovr.out_path) spec.out_path = *ovr.out_path;
  if (ovr.aggregate_path) spec.aggregate_path = *ovr.aggregate_path;
  if (ovr.timing) spec.timing = *ovr.timing;
  if (ovr.trace_snr_db) spec.trace_snr_db = *ovr.trace_snr_db;
  if (ovr.trace_seed) spec.trace_seed = *ovr.trace_seed;
  spec.validate();
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct TrialOutput {
  ResultRow bd;
  ResultRow proposed;
};

// Re-check the solution invariants before a row is emitted.
void check_row_invariants(const NetworkConfig& cfg, const ChannelSet& ch,
                          const CovarianceSet& s, double rho, bool proposed) {
  validate_covariances(cfg, s);
  const double cap = cfg.bs_power * (1.0 + 1e-6);
  for (int j = 0; j < cfg.num_bs; ++j) {
    if (per_bs_power(cfg, s, j) > cap) {
      throw std::runtime_error("per-BS power exceeds the budget");
    }
  }
  if (proposed) {
    if (!(rho > 0.0) || rho > 1.0 + 1e-9) {
      throw std::runtime_error("power factor outside (0, 1]");
    }
  } else if (leakage_norm(ch, s) > 1e-8) {
    throw std::runtime_error("zero-interference residual too large");
  }
}

TrialOutput run_trial(const ExperimentSpec& spec, int snr_index, int trial) {
  const double snr_db = spec.snr_list_db[snr_index];
  const NetworkConfig cfg = spec.config_at(snr_db);
  const std::uint64_t seed = rng::derive_stream(
      spec.base_seed, static_cast<std::uint64_t>(snr_index), static_cast<std::uint64_t>(trial));
  const ChannelSet ch = sample_channels(cfg, seed);

  TrialOutput out;
  out.bd.snr_db = out.proposed.snr_db = snr_db;
  out.bd.trial = out.proposed.trial = trial;
  out.bd.scheme = "bd";
  out.proposed.scheme = "proposed";

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  BDSolution bd;
  try {
    bd = bd_solve(cfg, ch);
    out.bd.sum_rate_nats = bd.sum_rate_nats;
    out.bd.sum_rate_bits = nats_to_bits(bd.sum_rate_nats);
    out.bd.rho = 1.0;
    out.bd.snr_boost_db = 0.0;
    out.bd.iterations = bd.iterations;
    check_row_invariants(cfg, ch, bd.covariances, 1.0, false);
  } catch (const std::exception& e) {
    out.bd.status = std::string("error: ") + e.what();
    out.proposed.status = "error: bd stage failed";
    return out;
  }
  const auto t1 = clock::now();
  if (spec.timing) {
    out.bd.wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  }

  if (spec.scheme_proposed) {
    try {
      const EnhanceSolution sol = solve_enhanced(cfg, ch, bd);
      out.proposed.sum_rate_nats = sol.sum_rate_nats;
      out.proposed.sum_rate_bits = nats_to_bits(sol.sum_rate_nats);
      out.proposed.rho = sol.rho;
      out.proposed.snr_boost_db = snr_boost_db(sol.rho);
      out.proposed.iterations = sol.iterations;
      check_row_invariants(cfg, ch, sol.proposed, sol.rho, true);
    } catch (const std::exception& e) {
      out.proposed.status = std::string("error: ") + e.what();
    }
    if (spec.timing) {
      out.proposed.wall_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t1).count();
    }
  }
  return out;
}

AggregateRow aggregate_rows(double snr_db, const std::string& scheme,
                            const std::vector<const ResultRow*>& rows) {
  AggregateRow agg;
  agg.snr_db = snr_db;
  agg.scheme = scheme;
  std::vector<double> nats, bits, rho, boost;
  for (const ResultRow* r : rows) {
    if (r->status != "ok") continue;
    nats.push_back(r->sum_rate_nats);
    bits.push_back(r->sum_rate_bits);
    rho.push_back(r->rho);
    boost.push_back(r->snr_boost_db);
  }
  agg.trials = static_cast<int>(nats.size());
  auto mean = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
  };
  auto stderr_of = [&](const std::vector<double>& v, double m) {
    if (v.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    const double var = acc / static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
  };
  agg.mean_sum_rate_nats = mean(nats);
  agg.stderr_sum_rate_nats = stderr_of(nats, agg.mean_sum_rate_nats);
  agg.mean_sum_rate_bits = mean(bits);
  agg.stderr_sum_rate_bits = stderr_of(bits, agg.mean_sum_rate_bits);
  agg.mean_rho = mean(rho);
  agg.mean_snr_boost_db = mean(boost);
  agg.stderr_snr_boost_db = stderr_of(boost, agg.mean_snr_boost_db);
  return agg;
}

}  // namespace

SweepResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const int num_snr = static_cast<int>(spec.snr_list_db.size());
  const int num_tasks = num_snr * spec.trials;
  std::vector<TrialOutput> outputs(num_tasks);

  std::atomic<int> next_task{0};
  auto worker = [&]() {
    for (;;) {
      const int task = next_task.fetch_add(1);
      if (task >= num_tasks) break;
      const int snr_index = task / spec.trials;
      const int trial = task % spec.trials;
      outputs[task] = run_trial(spec, snr_index, trial);
    }
  };
  if (spec.jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(spec.jobs);
    for (int t = 0; t < spec.jobs; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  SweepResult result;
  result.rows.reserve(static_cast<std::size_t>(num_tasks) * 2);
  for (int s = 0; s < num_snr; ++s) {
    for (int t = 0; t < spec.trials; ++t) {
      const TrialOutput& o = outputs[s * spec.trials + t];
      if (spec.scheme_bd) result.rows.push_back(o.bd);
      if (spec.scheme_proposed) result.rows.push_back(o.proposed);
    }
  }
  for (int s = 0; s < num_snr; ++s) {
    for (int which = 0; which < 2; ++which) {
      const bool is_bd = which == 0;
      if ((is_bd && !spec.scheme_bd) || (!is_bd && !spec.scheme_proposed)) {
        continue;
      }
      std::vector<const ResultRow*> rows;
      rows.reserve(spec.trials);
      for (int t = 0; t < spec.trials; ++t) {
        const TrialOutput& o = outputs[s * spec.trials + t];
        rows.push_back(is_bd ? &o.bd : &o.proposed);
      }
      result.aggregate.push_back(
          aggregate_rows(spec.snr_list_db[s], is_bd ? "bd" : "proposed", rows));
    }
  }
  return result;
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  out << "snr_db,trial,scheme,sum_rate_nats,sum_rate_bits,rho,snr_boost_db,"
         "iterations,wall_ms,status\n";
  for (const ResultRow& r : rows) {
    out << fmt(r.snr_db) << ',' << r.trial << ',' << r.scheme << ','
        << fmt(r.sum_rate_nats) << ',' << fmt(r.sum_rate_bits) << ',' << fmt(r.rho)
        << ',' << fmt(r.snr_boost_db) << ',' << r.iterations << ',' << r.wall_ms
        << ',' << r.status << '\n';
  }
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  out << "snr_db,scheme,trials,mean_sum_rate_nats,stderr_sum_rate_nats,"
         "mean_sum_rate_bits,stderr_sum_rate_bits,mean_rho,mean_snr_boost_db,"
         "stderr_snr_boost_db\n";
  for (const AggregateRow& r : rows) {
    out << fmt(r.snr_db) << ',' << r.scheme << ',' << r.trials << ','
        << fmt(r.mean_sum_rate_nats) << ',' << fmt(r.stderr_sum_rate_nats) << ','
        << fmt(r.mean_sum_rate_bits) << ',' << fmt(r.stderr_sum_rate_bits) << ','
        << fmt(r.mean_rho) << ',' << fmt(r.mean_snr_boost_db) << ','
        << fmt(r.stderr_snr_boost_db) << '\n';
  }
}

TraceResult run_convergence_trace(const ExperimentSpec& spec) {
  if (!spec.trace_snr_db || !spec.trace_seed) {
    throw std::invalid_argument("trace: snr and seed required");
  }
  const NetworkConfig cfg = spec.config_at(*spec.trace_snr_db);
  const ChannelSet ch = sample_channels(cfg, *spec.trace_seed);
  const BDSolution bd = bd_solve(cfg, ch);
  const EnhanceSolution sol = solve_enhanced(cfg, ch, bd);
  TraceResult out;
  out.iterates = sol.trace;
  out.bd_sum_rate_nats = bd.sum_rate_nats;
  out.final_rho = sol.rho;
  return out;
}

void write_trace_csv(const std::string& path, const TraceResult& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  out << "iteration,scaled_sum_rate_nats,scaled_sum_rate_bits,rho,cut_kind,"
         "bd_sum_rate_nats,bd_sum_rate_bits\n";
  for (const EnhanceIterate& e : trace.iterates) {
    out << e.iteration << ',';
    if (e.kind == CutKind::kObjective) {
      out << fmt(e.scaled_sum_rate) << ',' << fmt(nats_to_bits(e.scaled_sum_rate))
          << ',' << fmt(e.rho) << ",objective,";
    } else {
      out << ",,,feasibility,";
    }
    out << fmt(trace.bd_sum_rate_nats) << ',' << fmt(nats_to_bits(trace.bd_sum_rate_nats))
        << '\n';
  }
}

}  // namespace netmimo
