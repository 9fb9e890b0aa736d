// Copyright 2026 The fedstab Authors. All Rights Reserved.
//
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
// =============================================================================

#include "fedstab/commands.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "fedstab/errors.h"
#include "fedstab/experiment.h"
#include "fedstab/output.h"
#include "fedstab/text.h"

namespace fedstab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double epsilon_of(const FederationConfig& f) {
  return f.schedule.kind == ScheduleKind::kExponential ? f.schedule.epsilon : 1.0;
}

json axes_json(const FederationConfig& f) {
  return json{{"K", f.local_steps},
              {"beta", f.server.kind == ServerOptKind::kMomentum ? f.server.beta : 0.0},
              {"epsilon", epsilon_of(f)},
              {"eta_g", f.eta_g},
              {"seed", f.seed}};
}

json metrics_json(const RoundMetrics& m) {
  json out{{"t", m.t},
           {"train_loss", number_or_null(m.train_loss)},
           {"test_loss", number_or_null(m.test_loss)},
           {"grad_norm_sq", number_or_null(m.grad_norm_sq)},
           {"gen_gap", number_or_null(m.gen_gap)},
           {"excess_risk", number_or_null(m.excess_risk)},
           {"eta_g_t", number_or_null(m.eta_g_t)}};
  if (m.stability_sq) out["stability_sq"] = number_or_null(*m.stability_sq);
  return out;
}

json minimum_json(const EmpiricalMinimum& minimum) {
  return json{{"value", number_or_null(minimum.value)},
              {"strategy", std::string(to_string(minimum.strategy))},
              {"budget_limited", minimum.budget_limited}};
}

void add_excess_summary(json& out, const std::vector<RoundMetrics>& metrics) {
  const RoundMetrics* best = nullptr;
  for (const auto& m : metrics) {
    if (!best || m.excess_risk < best->excess_risk) best = &m;
  }
  out["e_min"] = best ? number_or_null(best->excess_risk) : json(nullptr);
  out["t_star"] = best ? json(best->t) : json(nullptr);
  out["final"] = metrics.empty() ? json(nullptr) : metrics_json(metrics.back());
}

std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    double v = 0.0;
    if (!parse_double(item, v)) throw ConfigError("[plan] " + key + ": bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

struct ReportRow {
  std::string dir;
  std::string kind;
  json axes;
  double e_min = NAN;
  double t_star = NAN;
  double final_gen_gap = NAN;
  double final_test_loss = NAN;
  double final_mean_sq_dist = NAN;
  std::string fingerprint;
};

double json_double(const json& j) { return j.is_number() ? j.get<double>() : NAN; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string cell(double v) { return std::isnan(v) ? "" : format_double(v); }

void monotone_trend(const std::vector<ReportRow>& rows, const std::string& axis,
                    double (*metric)(const ReportRow&), const std::string& metric_name,
                    double min_ratio, const std::string& label, std::ostream& out) {
  std::map<double, std::vector<double>> groups;
  for (const auto& r : rows) groups[r.axes[axis].get<double>()].push_back(metric(r));
  std::vector<double> medians;
  out << "trend " << label << " (median " << metric_name << " by " << axis << "):";
  for (const auto& [value, samples] : groups) {
    medians.push_back(median(samples));
    out << " " << format_double(value) << "->" << format_double(medians.back());
  }
  bool pass = groups.size() >= 2;
  for (std::size_t k = 1; k < medians.size(); ++k) pass = pass && medians[k] >= medians[k - 1];
  if (pass) pass = medians.back() >= min_ratio * medians.front();
  out << "\n  " << (pass ? "PASS" : "FAIL") << ": non-decreasing and last >= "
      << format_double(min_ratio) << " x first\n";
}

void decay_trend(const std::vector<ReportRow>& rows, std::ostream& out) {
  std::map<std::uint64_t, double> constant;
  for (const auto& r : rows) {
    if (r.axes["epsilon"].get<double>() == 1.0) {
      constant[r.axes["seed"].get<std::uint64_t>()] = r.final_test_loss;
    }
  }
  std::map<double, std::pair<int, int>> wins;  // epsilon -> (wins, paired seeds)
  for (const auto& r : rows) {
    const double eps = r.axes["epsilon"].get<double>();
    if (eps == 1.0) continue;
    auto it = constant.find(r.axes["seed"].get<std::uint64_t>());
    if (it == constant.end()) continue;
    auto& w = wins[eps];
    w.second += 1;
    if (r.final_test_loss <= it->second) w.first += 1;
  }
  if (wins.empty()) {
    out << "trend decay-stabilization: skipped (needs epsilon=1 runs paired by seed)\n";
    return;
  }
  for (const auto& [eps, w] : wins) {
    const bool pass = w.second > 0 && 5 * w.first >= 4 * w.second;
    out << "trend decay-stabilization epsilon=" << format_double(eps) << ": " << w.first << "/"
        << w.second << " seeds with final test loss <= constant\n  " << (pass ? "PASS" : "FAIL")
        << "\n";
  }
}

}  // namespace

void apply_overrides(Config& config, const Overrides& overrides) {
  if (!config.federation) return;
  if (overrides.seed) config.federation->seed = *overrides.seed;
  if (overrides.workers) config.federation->workers = *overrides.workers;
  if (overrides.eval_every) config.federation->eval_every = *overrides.eval_every;
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kK:
      return "K";
    case SweepAxis::kBeta:
      return "beta";
    case SweepAxis::kEpsilon:
      return "epsilon";
    case SweepAxis::kEtaG:
      return "eta_g";
  }
  return "?";
}

ExperimentPlan load_plan(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(path + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [name, node] : tree) {
    if (name != "plan") throw ConfigError(path + ": unknown section [" + name + "]");
  }
  const auto section = tree.get_child_optional("plan");
  if (!section) throw ConfigError(path + ": missing [plan] section");
  ExperimentPlan plan;
  std::vector<SweepAxis> axes;
  for (const auto& [key, node] : *section) {
    const std::string value = trim(node.data());
    if (key == "base") {
      plan.base_config = (fs::path(path).parent_path() / value).string();
    } else if (key == "seeds") {
      for (double s : parse_number_list(value, key)) {
        if (s < 0 || s != std::floor(s)) throw ConfigError("[plan] seeds must be integers >= 0");
        plan.seeds.push_back(static_cast<std::uint64_t>(s));
      }
    } else if (key == "out") {
      plan.out_dir = value;
    } else if (key == "K" || key == "beta" || key == "epsilon" || key == "eta_g") {
      axes.push_back(key == "K"      ? SweepAxis::kK
                     : key == "beta" ? SweepAxis::kBeta
                     : key == "epsilon" ? SweepAxis::kEpsilon
                                        : SweepAxis::kEtaG);
      plan.axis = axes.back();
      plan.values = parse_number_list(value, key);
      if (plan.values.empty()) throw ConfigError("[plan] " + key + ": empty axis list");
    } else {
      throw ConfigError("[plan] unknown key '" + key + "'");
    }
  }
  if (plan.base_config.empty()) throw ConfigError("[plan] missing required key 'base'");
  if (axes.size() != 1) {
    throw ConfigError("[plan] exactly one sweep axis (K, beta, epsilon, eta_g) is required, found " +
                      std::to_string(axes.size()));
  }
  if (plan.seeds.empty()) throw ConfigError("[plan] seeds must list at least one seed");
  return plan;
}

Config apply_axis(Config config, SweepAxis axis, double value) {
  FederationConfig& f = *config.federation;
  switch (axis) {
    case SweepAxis::kK:
      if (value < 1 || value != std::floor(value)) throw ConfigError("[plan] K values must be integers >= 1");
      f.local_steps = static_cast<std::size_t>(value);
      break;
    case SweepAxis::kBeta:
      f.server.kind = ServerOptKind::kMomentum;
      f.server.beta = value;
      break;
    case SweepAxis::kEpsilon:
      f.schedule.kind = ScheduleKind::kExponential;
      f.schedule.epsilon = value;
      break;
    case SweepAxis::kEtaG:
      f.eta_g = value;
      break;
  }
  f.validate();
  return config;
}

void run_to_directory(const Config& config, const std::string& out_dir) {
  const Experiment ex = build_experiment(config);
  const EmpiricalMinimum minimum = resolve_minimum(ex, config.reference_steps);
  RunOptions options;
  options.f_hat_min = minimum.value;
  const RunResult result = run_federated(ex.federation, ex.train, ex.spec, ex.test, options);
  json summary{{"schema_version", kSchemaVersion},
               {"kind", "run"},
               {"fingerprint", config.fingerprint()},
               {"seed", ex.federation.seed},
               {"axes", axes_json(ex.federation)},
               {"f_hat_min", minimum_json(minimum)},
               {"config", config.canonical()}};
  add_excess_summary(summary, result.metrics);
  write_file((fs::path(out_dir) / "metrics.csv").string(), metrics_csv(result.metrics));
  write_file((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const Overrides& overrides, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Config config = load_config(config_path);
    config.require_federation();
    apply_overrides(config, overrides);
    run_to_directory(config, out_dir);
    out << "wrote " << (fs::path(out_dir) / "metrics.csv").string() << "\n";
  });
}

int cmd_sweep(const std::string& plan_path, const std::string& out_dir,
              const Overrides& overrides, std::ostream& out, std::ostream& err) {
  bool any_failed = false;
  const int code = guarded(err, [&] {
    const ExperimentPlan plan = load_plan(plan_path);
    Config base = load_config(plan.base_config);
    base.require_federation();
    Overrides cell_overrides = overrides;
    cell_overrides.workers.reset();  // the flag sizes the cell pool here
    apply_overrides(base, cell_overrides);
    const std::string root = out_dir.empty() ? plan.out_dir : out_dir;
    if (root.empty()) throw ConfigError("sweep needs --out or [plan] out");

    struct Cell {
      double value;
      std::uint64_t seed;
      std::string dir;
      std::string error;
    };
    std::vector<Cell> cells;
    for (double v : plan.values) {
      for (std::uint64_t s : plan.seeds) {
        const std::string name = std::string(to_string(plan.axis)) + "_" + format_double(v) +
                                 "_seed_" + std::to_string(s);
        cells.push_back({v, s, (fs::path(root) / name).string(), ""});
      }
    }
    // Validate every cell before launching any work.
    for (const auto& c : cells) {
      Config cfg = apply_axis(base, plan.axis, c.value);
      cfg.federation->seed = c.seed;
    }

    std::size_t pool = overrides.workers.value_or(std::max(1u, std::thread::hardware_concurrency()));
    pool = std::clamp<std::size_t>(pool, 1, cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < cells.size(); k = next++) {
        Cell& c = cells[k];
        try {
          Config cfg = apply_axis(base, plan.axis, c.value);
          cfg.federation->seed = c.seed;
          cfg.federation->workers = 1;
          run_to_directory(cfg, c.dir);
        } catch (const std::exception& e) {
          c.error = e.what();
        }
      }
    };
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < pool; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    // Coordinator merges in deterministic cell order.
    std::string merged = "axis,value,seed," + std::string(kMetricsHeader) + "\n";
    std::size_t ok = 0;
    for (const auto& c : cells) {
      if (!c.error.empty()) {
        any_failed = true;
        err << "cell " << c.dir << " failed: " << c.error << "\n";
        write_file((fs::path(c.dir) / "error.txt").string(), c.error + "\n");
        continue;
      }
      ++ok;
      std::istringstream csv(read_file((fs::path(c.dir) / "metrics.csv").string()));
      std::string line;
      std::getline(csv, line);  // header
      const std::string prefix = std::string(to_string(plan.axis)) + "," + format_double(c.value) +
                                 "," + std::to_string(c.seed) + ",";
      while (std::getline(csv, line)) {
        if (!line.empty()) merged += prefix + line + "\n";
      }
    }
    write_file((fs::path(root) / "merged.csv").string(), merged);
    out << ok << "/" << cells.size() << " cells completed; merged "
        << (fs::path(root) / "merged.csv").string() << "\n";
  });
  if (code != kExitOk) return code;
  return any_failed ? kExitRuntime : kExitOk;
}

int cmd_probe(const std::string& config_path, const std::string& out_dir,
              const Overrides& overrides, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Config config = load_config(config_path);
    config.require_federation();
    const ProbeConfig probe = config.require_probe();
    apply_overrides(config, overrides);
    const Experiment ex = build_experiment(config);
    if (!ex.source) throw ConfigError("[probe] needs a synthetic data source for replacement draws");
    const EmpiricalMinimum minimum = resolve_minimum(ex, config.reference_steps);
    const std::vector<std::uint64_t> seeds =
        probe.seeds.empty() ? std::vector<std::uint64_t>{ex.federation.seed} : probe.seeds;

    std::vector<std::vector<double>> curves;
    std::vector<std::size_t> indices;
    TwinOptions twin_opts;
    twin_opts.record_metrics = false;
    for (std::uint64_t seed : seeds) {
      std::vector<std::size_t> chosen = probe.indices;
      if (chosen.empty()) {
        if (probe.replicates < 1) throw ConfigError("[probe] replicates must be >= 1");
        chosen = sample_probe_indices(ex.train.dataset.size(), probe.replicates, seed);
      }
      for (std::size_t j : chosen) {
        if (j >= ex.train.dataset.size()) {
          throw ConfigError("[probe] indices: " + std::to_string(j) + " is out of range");
        }
        const NeighborPair pair =
            make_neighbor(ex.train.dataset, ex.train.shards, *ex.source, j, seed, probe.mode);
        curves.push_back(
            twin_run(ex.federation, pair, ex.train.shards, ex.spec, ex.test, twin_opts).sq_dist);
        indices.push_back(j);
      }
    }
    const StabilityCurve curve = combine_replicates(curves, indices);
    RunOptions run_opts;
    run_opts.f_hat_min = minimum.value;
    RunResult paired = run_federated(ex.federation, ex.train, ex.spec, ex.test, run_opts);
    for (auto& m : paired.metrics) m.stability_sq = curve.mean_sq_dist[m.t];

    json summary{{"schema_version", kSchemaVersion},
                 {"kind", "probe"},
                 {"fingerprint", config.fingerprint()},
                 {"seed", ex.federation.seed},
                 {"axes", axes_json(ex.federation)},
                 {"J", curve.replicates},
                 {"seeds", seeds},
                 {"replaced_indices", curve.replaced_indices},
                 {"f_hat_min", minimum_json(minimum)},
                 {"final_mean_sq_dist", number_or_null(curve.mean_sq_dist.back())},
                 {"config", config.canonical()}};
    add_excess_summary(summary, paired.metrics);
    write_file((fs::path(out_dir) / "probe.csv").string(), probe_csv(curve, paired.metrics));
    write_file((fs::path(out_dir) / "metrics.csv").string(), metrics_csv(paired.metrics));
    write_file((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
    out << "wrote " << (fs::path(out_dir) / "probe.csv").string() << "\n";
  });
}

int cmd_bounds(const std::string& config_path, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    const Config config = load_config(config_path);
    const BoundsConfig& b = config.require_bounds();
    const BoundInputs& in = b.inputs;
    in.validate();
    const StepSchedule schedule =
        b.schedule == "constant" ? constant_steps(b.eta) : inverse_sqrt_steps(in.c);

    const Recursion exact = stability_recursion_sgd(in, schedule);
    const Recursion fosm = stability_recursion_fosm(in, schedule);
    const ExcessRiskBound sgd = excess_risk_bound_sgd(in);
    const ExcessRiskBound mom = excess_risk_bound_fosm(in);
    bool psi_out = false;
    const double p = psi(in.eta_l, in.L, in.K, &psi_out);

    std::vector<std::string> warnings;
    if (psi_out) warnings.push_back("psi outside (1, 2): eta_l outside the 1/(KL) regime");
    for (const auto* list : {&exact.warnings, &sgd.warnings, &mom.warnings}) {
      for (const auto& w : *list) {
        if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
      }
    }
    for (const auto& w : warnings) err << "warning: " << w << "\n";

    auto terms = [](const ExcessRiskBound& e) {
      return json{{"convergence_sqrt", number_or_null(e.convergence_sqrt)},
                  {"convergence_linear", number_or_null(e.convergence_linear)},
                  {"stability", number_or_null(e.stability)},
                  {"stability_proof_sigma", number_or_null(e.stability_proof_sigma)},
                  {"log_stability", number_or_null(e.log_stability)},
                  {"optimization", number_or_null(e.optimization)},
                  {"exponent", e.exponent},
                  {"total", number_or_null(e.total)},
                  {"beta_minus", e.beta_minus},
                  {"log_beta_plus", e.log_beta_plus},
                  {"log_psi_beta", number_or_null(e.log_psi_beta)}};
    };
    json summary{{"schema_version", kSchemaVersion},
                 {"kind", "bounds"},
                 {"fingerprint", config.fingerprint()},
                 {"envelope_constants", "order-level, leading constants 1"},
                 {"psi", p},
                 {"psi_sigma", in.psi_sigma()},
                 {"c_psi", in.c * p},
                 {"sigma_n_sq", in.sigma_n_sq()},
                 {"sigma_n_sq_proof", in.sigma_n_sq_proof()},
                 {"sigma_k_sq", in.sigma_k_sq()},
                 {"stability_recursion_sgd_T", number_or_null(exact.s.back())},
                 {"stability_recursion_fosm_T", number_or_null(fosm.s.back())},
                 {"stability_closed_form_sgd", number_or_null(stability_closed_form_sgd(in))},
                 {"convergence_bound_sgd", number_or_null(convergence_bound_sgd(in))},
                 {"excess_risk_sgd", terms(sgd)},
                 {"excess_risk_fosm", terms(mom)},
                 {"overfitting_regime", sgd.overfitting_regime || mom.overfitting_regime},
                 {"warnings", warnings}};
    const fs::path dir(out_dir);
    write_file((dir / "recursion.csv").string(), recursion_csv(in, schedule, b.record_every));
    write_file((dir / "envelope_sgd.csv").string(), envelope_csv(in, false, b.record_every));
    write_file((dir / "envelope_fosm.csv").string(), envelope_csv(in, true, b.record_every));
    write_file((dir / "bounds.json").string(), summary.dump(2) + "\n");
    out << "wrote " << (dir / "bounds.json").string() << "\n";
  });
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (run_dirs.empty()) throw ConfigError("report needs at least one run directory");
    std::vector<ReportRow> rows;
    for (const auto& dir : run_dirs) {
      const fs::path path = fs::path(dir) / "summary.json";
      if (!fs::exists(path)) {
        err << "warning: " << path.string() << " missing; skipped\n";
        continue;
      }
      const json j = json::parse(read_file(path.string()));
      ReportRow r;
      r.dir = dir;
      r.kind = j.value("kind", "run");
      r.axes = j.at("axes");
      r.e_min = json_double(j["e_min"]);
      r.t_star = json_double(j["t_star"]);
      if (j["final"].is_object()) {
        r.final_gen_gap = json_double(j["final"]["gen_gap"]);
        r.final_test_loss = json_double(j["final"]["test_loss"]);
      }
      if (j.contains("final_mean_sq_dist")) r.final_mean_sq_dist = json_double(j["final_mean_sq_dist"]);
      r.fingerprint = j.value("fingerprint", "");
      rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::runtime_error("no run summaries found");

    const std::vector<std::string> columns{"dir", "kind", "K", "beta", "epsilon", "eta_g", "seed",
                                           "e_min", "t_star", "final_gen_gap", "final_test_loss",
                                           "fingerprint"};
    std::vector<std::vector<std::string>> table;
    for (const auto& r : rows) {
      table.push_back({r.dir, r.kind, std::to_string(r.axes["K"].get<std::size_t>()),
                       format_double(r.axes["beta"].get<double>()),
                       format_double(r.axes["epsilon"].get<double>()),
                       format_double(r.axes["eta_g"].get<double>()),
                       std::to_string(r.axes["seed"].get<std::uint64_t>()), cell(r.e_min),
                       cell(r.t_star), cell(r.final_gen_gap), cell(r.final_test_loss),
                       r.fingerprint});
    }
    std::string csv;
    for (std::size_t k = 0; k < columns.size(); ++k) csv += (k ? "," : "") + columns[k];
    csv += "\n";
    for (const auto& row : table) {
      for (std::size_t k = 0; k < row.size(); ++k) csv += (k ? "," : "") + row[k];
      csv += "\n";
    }
    std::vector<std::size_t> width(columns.size());
    for (std::size_t k = 0; k < columns.size(); ++k) {
      width[k] = columns[k].size();
      for (const auto& row : table) width[k] = std::max(width[k], row[k].size());
    }
    std::ostringstream text;
    auto print_row = [&](const std::vector<std::string>& row) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        text << (k ? "  " : "") << std::left << std::setw(static_cast<int>(width[k])) << row[k];
      }
      text << "\n";
    };
    print_row(columns);
    for (const auto& row : table) print_row(row);

    std::vector<std::string> varying;
    for (const char* axis : {"K", "beta", "epsilon", "eta_g"}) {
      std::set<double> values;
      for (const auto& r : rows) values.insert(r.axes[axis].get<double>());
      if (values.size() > 1) varying.push_back(axis);
    }
    if (varying.size() > 1) {
      throw ConfigError("runs come from incompatible sweeps: axis '" + varying[1] +
                        "' varies alongside '" + varying[0] + "'");
    }
    if (varying.empty()) {
      text << "no sweep axis varies; trend tests skipped\n";
    } else if (varying[0] == "K") {
      monotone_trend(rows, "K", [](const ReportRow& r) { return r.final_gen_gap; },
                     "final gen_gap", 1.25, "monotone-in-K", text);
    } else if (varying[0] == "beta") {
      const bool probes = std::all_of(rows.begin(), rows.end(),
                                      [](const ReportRow& r) { return r.kind == "probe"; });
      if (probes) {
        monotone_trend(rows, "beta", [](const ReportRow& r) { return r.final_mean_sq_dist; },
                       "final mean_sq_dist", 1.5, "monotone-in-beta", text);
      } else {
        monotone_trend(rows, "beta", [](const ReportRow& r) { return r.final_gen_gap; },
                       "final gen_gap", 1.5, "monotone-in-beta", text);
      }
    } else if (varying[0] == "epsilon") {
      decay_trend(rows, text);
    } else {
      text << "axis eta_g has no trend test\n";
    }
    out << text.str();
    if (!out_dir.empty()) {
      write_file((fs::path(out_dir) / "report.csv").string(), csv);
      write_file((fs::path(out_dir) / "report.txt").string(), text.str());
    }
  });
}

}  // namespace fedstab
