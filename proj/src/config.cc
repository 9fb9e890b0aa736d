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

#include "fedstab/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "fedstab/errors.h"
#include "fedstab/rng.h"
#include "fedstab/text.h"

namespace fedstab {
namespace {

namespace pt = boost::property_tree;

// Key/value reader for one section; every key must be consumed.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)) {
    for (const auto& [key, node] : tree) {
      if (!node.empty()) throw ConfigError("[" + name_ + "] " + key + ": nested keys not allowed");
      values_[key] = trim(node.data());
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string fail_prefix(const std::string& key) const { return "[" + name_ + "] " + key + ": "; }

  std::optional<std::string> text(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  template <typename Fn>
  void read(const std::string& key, Fn&& apply) {
    if (auto v = text(key)) {
      try {
        apply(*v);
      } catch (const ConfigError& e) {
        throw ConfigError(fail_prefix(key) + e.what());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fail_prefix(key) + e.what());
      }
    }
  }

  void number(const std::string& key, double& out) {
    read(key, [&](const std::string& v) { out = to_double(v); });
  }
  void count(const std::string& key, std::size_t& out) {
    read(key, [&](const std::string& v) { out = to_size(v); });
  }
  void seed(const std::string& key, std::uint64_t& out) {
    read(key, [&](const std::string& v) { out = to_size(v); });
  }
  void flag(const std::string& key, bool& out) {
    read(key, [&](const std::string& v) {
      if (v == "true" || v == "1") {
        out = true;
      } else if (v == "false" || v == "0") {
        out = false;
      } else {
        throw ConfigError("expected true or false, got '" + v + "'");
      }
    });
  }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError("[" + name_ + "] missing required key '" + key + "'");
  }

  void finish() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) throw ConfigError("[" + name_ + "] unknown key '" + key + "'");
    }
  }

  static double to_double(const std::string& v) {
    double out = 0.0;
    if (!parse_double(v, out) || !std::isfinite(out)) {
      throw ConfigError("expected a finite number, got '" + v + "'");
    }
    return out;
  }

  static std::uint64_t to_size(const std::string& v) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("expected a non-negative integer, got '" + v + "'");
    }
    return out;
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

void read_federation(Section& s, FederationConfig& f) {
  s.count("clients", f.clients);
  s.count("local_steps", f.local_steps);
  s.count("batch_size", f.batch_size);
  s.number("eta_l", f.eta_l);
  s.number("eta_g", f.eta_g);
  s.read("schedule", [&](const std::string& v) { f.schedule.kind = parse_schedule_kind(v); });
  s.number("schedule_c", f.schedule.c);
  s.number("epsilon", f.schedule.epsilon);
  s.count("rounds", f.rounds);
  s.number("participation", f.participation);
  s.read("server", [&](const std::string& v) {
    if (v == "sgd") {
      f.server.kind = ServerOptKind::kSgd;
    } else if (v == "momentum") {
      f.server.kind = ServerOptKind::kMomentum;
    } else {
      throw ConfigError("expected sgd or momentum, got '" + v + "'");
    }
  });
  s.number("beta", f.server.beta);
  s.number("nu", f.server.nu);
  s.seed("seed", f.seed);
  s.count("eval_every", f.eval_every);
  s.count("workers", f.workers);
}

void read_model(Section& s, Config& c) {
  ModelSpec& m = c.model;
  s.read("family", [&](const std::string& v) { m.family = parse_model_family(v); });
  s.count("input_dim", m.input_dim);
  s.count("hidden_dim", m.hidden_dim);
  s.count("num_classes", m.num_classes);
  s.number("weight_decay", m.weight_decay);
  s.flag("bias", m.bias);
  s.count("reference_steps", c.reference_steps);
}

void read_data(Section& s, DataConfig& d) {
  s.read("source", [&](const std::string& v) {
    if (v == "synthetic") {
      d.source = DataSource::kSynthetic;
    } else if (v == "dirichlet") {
      d.source = DataSource::kDirichlet;
    } else if (v == "csv") {
      d.source = DataSource::kCsv;
    } else {
      throw ConfigError("expected synthetic, dirichlet or csv, got '" + v + "'");
    }
  });
  s.read("task", [&](const std::string& v) { d.task = parse_task_kind(v); });
  s.count("per_client_n", d.per_client_n);
  s.number("hetero", d.hetero);
  s.number("noise", d.noise);
  s.number("signal", d.signal);
  s.number("alpha", d.alpha);
  s.count("test_per_client", d.test_per_client);
  s.read("seed", [&](const std::string& v) { d.seed = Section::to_size(v); });
  s.read("train_csv", [&](const std::string& v) { d.train_csv = v; });
  s.read("test_csv", [&](const std::string& v) { d.test_csv = v; });
  s.read("partition", [&](const std::string& v) {
    if (v != "contiguous" && v != "dirichlet") {
      throw ConfigError("expected contiguous or dirichlet, got '" + v + "'");
    }
    d.partition = v;
  });
}

void read_probe(Section& s, ProbeConfig& p) {
  s.count("replicates", p.replicates);
  s.read("indices", [&](const std::string& v) {
    p.indices.clear();
    if (v == "sample") return;
    for (const auto& item : split_list(v)) p.indices.push_back(Section::to_size(item));
  });
  s.read("seeds", [&](const std::string& v) {
    p.seeds.clear();
    for (const auto& item : split_list(v)) p.seeds.push_back(Section::to_size(item));
  });
  s.read("mode", [&](const std::string& v) {
    if (v == "fresh") {
      p.mode = Replacement::kFreshDraw;
    } else if (v == "original") {
      p.mode = Replacement::kForceOriginal;
    } else {
      throw ConfigError("expected fresh or original, got '" + v + "'");
    }
  });
}

void read_bounds(Section& s, BoundsConfig& b) {
  BoundInputs& in = b.inputs;
  for (const char* key : {"L", "sigma_l_sq", "sigma_g_sq", "n", "K", "T", "c", "eta_l", "F_init"}) {
    s.require(key);
  }
  s.number("L", in.L);
  s.number("sigma_l_sq", in.sigma_l_sq);
  s.number("sigma_g_sq", in.sigma_g_sq);
  s.number("n", in.n);
  s.count("K", in.K);
  s.count("T", in.T);
  s.number("c", in.c);
  s.number("eta_l", in.eta_l);
  s.number("F_init", in.F_init);
  s.number("beta", in.beta);
  s.number("nu", in.nu);
  s.number("gamma", in.gamma);
  s.number("C", in.C);
  s.read("mu", [&](const std::string& v) { in.mu = Section::to_double(v); });
  s.count("b", in.b);
  s.read("schedule", [&](const std::string& v) {
    if (v != "inverse_sqrt" && v != "constant") {
      throw ConfigError("expected inverse_sqrt or constant, got '" + v + "'");
    }
    b.schedule = v;
  });
  s.number("eta", b.eta);
  s.count("record_every", b.record_every);
  if (b.record_every < 1) throw ConfigError("[bounds] record_every must be >= 1");
}

void put(std::ostringstream& out, const char* key, const std::string& value) {
  out << key << '=' << value << '\n';
}
void put(std::ostringstream& out, const char* key, double value) {
  put(out, key, format_double(value));
}
void put(std::ostringstream& out, const char* key, std::size_t value) {
  put(out, key, std::to_string(value));
}

std::string join(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(values[k]);
  }
  return out;
}

}  // namespace

std::string_view to_string(DataSource source) {
  switch (source) {
    case DataSource::kSynthetic:
      return "synthetic";
    case DataSource::kDirichlet:
      return "dirichlet";
    case DataSource::kCsv:
      return "csv";
  }
  return "?";
}

const FederationConfig& Config::require_federation() const {
  if (!federation) throw ConfigError("config is missing the [federation] section");
  return *federation;
}

const ProbeConfig& Config::require_probe() const {
  if (!probe) throw ConfigError("config is missing the [probe] section");
  return *probe;
}

const BoundsConfig& Config::require_bounds() const {
  if (!bounds) throw ConfigError("config is missing the [bounds] section");
  return *bounds;
}

std::uint64_t Config::data_seed() const {
  if (data.seed) return *data.seed;
  return federation ? federation->seed : 0;
}

std::string Config::canonical() const {
  std::ostringstream out;
  if (federation) {
    const FederationConfig& f = *federation;
    out << "[federation]\n";
    put(out, "batch_size", f.batch_size);
    put(out, "beta", f.server.beta);
    put(out, "clients", f.clients);
    put(out, "epsilon", f.schedule.epsilon);
    put(out, "eta_g", f.eta_g);
    put(out, "eta_l", f.eta_l);
    put(out, "eval_every", f.eval_every);
    put(out, "local_steps", f.local_steps);
    put(out, "nu", f.server.nu);
    put(out, "participation", f.participation);
    put(out, "rounds", f.rounds);
    put(out, "schedule", std::string(to_string(f.schedule.kind)));
    put(out, "schedule_c", f.schedule.c);
    put(out, "seed", std::to_string(f.seed));
    put(out, "server", f.server.kind == ServerOptKind::kSgd ? "sgd" : "momentum");
  }
  out << "[model]\n";
  put(out, "bias", model.bias ? "true" : "false");
  put(out, "family", std::string(to_string(model.family)));
  put(out, "hidden_dim", model.hidden_dim);
  put(out, "input_dim", model.input_dim);
  put(out, "num_classes", model.num_classes);
  put(out, "reference_steps", reference_steps);
  put(out, "weight_decay", model.weight_decay);
  out << "[data]\n";
  put(out, "alpha", data.alpha);
  put(out, "hetero", data.hetero);
  put(out, "noise", data.noise);
  put(out, "partition", data.partition);
  put(out, "per_client_n", data.per_client_n);
  put(out, "seed", std::to_string(data_seed()));
  put(out, "signal", data.signal);
  put(out, "source", std::string(to_string(data.source)));
  put(out, "task", data.task ? std::string(to_string(*data.task)) : "auto");
  put(out, "test_csv", data.test_csv);
  put(out, "test_per_client", data.test_per_client);
  put(out, "train_csv", data.train_csv);
  if (probe) {
    out << "[probe]\n";
    put(out, "indices", probe->indices.empty() ? "sample" : join(probe->indices));
    put(out, "mode", probe->mode == Replacement::kFreshDraw ? "fresh" : "original");
    put(out, "replicates", probe->replicates);
    std::vector<std::size_t> seeds(probe->seeds.begin(), probe->seeds.end());
    put(out, "seeds", join(seeds));
  }
  if (bounds) {
    const BoundInputs& in = bounds->inputs;
    out << "[bounds]\n";
    put(out, "C", in.C);
    put(out, "F_init", in.F_init);
    put(out, "K", in.K);
    put(out, "L", in.L);
    put(out, "T", in.T);
    put(out, "b", in.b);
    put(out, "beta", in.beta);
    put(out, "c", in.c);
    put(out, "eta", bounds->eta);
    put(out, "eta_l", in.eta_l);
    put(out, "gamma", in.gamma);
    put(out, "mu", in.mu ? format_double(*in.mu) : "none");
    put(out, "n", in.n);
    put(out, "nu", in.nu);
    put(out, "record_every", bounds->record_every);
    put(out, "schedule", bounds->schedule);
    put(out, "sigma_g_sq", in.sigma_g_sq);
    put(out, "sigma_l_sq", in.sigma_l_sq);
  }
  return out.str();
}

std::string Config::fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(label_of(canonical())));
  return buf;
}

Config parse_config(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  Config config;
  std::set<std::string> seen;
  for (const auto& [name, node] : tree) {
    if (node.empty() && !node.data().empty()) {
      throw ConfigError(origin + ": key '" + name + "' outside any section");
    }
    seen.insert(name);
    Section s(name, node);
    if (name == "federation") {
      config.federation.emplace();
      read_federation(s, *config.federation);
    } else if (name == "model") {
      read_model(s, config);
    } else if (name == "data") {
      read_data(s, config.data);
    } else if (name == "probe") {
      config.probe.emplace();
      read_probe(s, *config.probe);
    } else if (name == "bounds") {
      config.bounds.emplace();
      read_bounds(s, *config.bounds);
    } else {
      throw ConfigError(origin + ": unknown section [" + name + "]");
    }
    s.finish();
  }
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

}  // namespace fedstab
