#include "shb/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace shb {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown config key '" + where + it.key() + "'");
  }
}

double get_num(const json& obj, const std::string& where, const char* key,
               std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing config key '" + where + key + "'");
  }
  if (!obj[key].is_number())
    throw ConfigError("config key '" + where + key + "' must be a number");
  return obj[key].get<double>();
}

std::string get_str(const json& obj, const std::string& where, const char* key,
                    std::optional<std::string> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing config key '" + where + key + "'");
  }
  if (!obj[key].is_string())
    throw ConfigError("config key '" + where + key + "' must be a string");
  return obj[key].get<std::string>();
}

MemorySchedule parse_memory(const json& m, const std::string& where) {
  check_keys(m, where, {"kind", "r"});
  const std::string kind = get_str(m, where, "kind");
  const double r = get_num(m, where, "r");
  if (kind == "exponential") return MemorySchedule::exponential(r);
  if (kind == "polynomial") return MemorySchedule::polynomial(r);
  throw ConfigError("config key '" + where + "kind' must be exponential or polynomial");
}

json memory_to_json(const MemorySchedule& m) {
  return json{{"kind", m.kind_name()}, {"r", m.r}};
}

}  // namespace

Potential PotentialConfig::build() const {
  if (kind == "quadratic") {
    const int d = static_cast<int>(matrix.size());
    if (d == 0) throw ConfigError("potential.matrix must be a non-empty square matrix");
    Matrix S(d);
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(matrix[i].size()) != d)
        throw ConfigError("potential.matrix must be square");
      for (int j = 0; j < d; ++j) S(i, j) = matrix[i][j];
    }
    return make_quadratic(S);
  }
  if (kind == "power") return make_power(p);
  if (kind == "double_well") return make_double_well(a, b);
  if (kind == "custom")
    throw ConfigError(
        "potential.kind 'custom' can only be supplied programmatically, not "
        "from a config file");
  throw ConfigError("potential.kind must be quadratic, power, double_well or custom");
}

std::vector<std::int64_t> CheckpointPlan::indices(std::int64_t horizon) const {
  if (count < 1) throw ConfigError("checkpoints.count must be >= 1");
  std::vector<std::int64_t> out;
  if (spacing == "linear") {
    for (int i = 1; i <= count; ++i) {
      const auto n = static_cast<std::int64_t>(
          std::llround(static_cast<double>(horizon) * i / count));
      if (n >= 1 && (out.empty() || n != out.back())) out.push_back(n);
    }
  } else if (spacing == "log") {
    const double lo = 0.0, hi = std::log(static_cast<double>(horizon));
    for (int i = 0; i < count; ++i) {
      const double e = count == 1 ? hi : lo + (hi - lo) * i / (count - 1);
      const auto n = static_cast<std::int64_t>(std::llround(std::exp(e)));
      if (n >= 1 && (out.empty() || n != out.back())) out.push_back(n);
    }
    if (out.empty() || out.back() != horizon) out.push_back(horizon);
  } else {
    throw ConfigError("checkpoints.spacing must be log or linear");
  }
  return out;
}

namespace {
ExperimentConfig parse_config_json(const std::string& text);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  try {
    return parse_config_json(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config value: ") + e.what());
  }
}

namespace {
ExperimentConfig parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "",
             {"algorithm", "potential", "step", "memory", "noise", "init",
              "horizon", "replicas", "checkpoints", "seed", "lyapunov",
              "fit_window", "trap"});

  ExperimentConfig cfg;

  if (root.contains("algorithm")) {
    if (!root["algorithm"].is_string())
      throw ConfigError("config key 'algorithm' must be a string");
    cfg.algorithm.kind = root["algorithm"].get<std::string>();
    static const std::set<std::string> kinds{"shb", "sgd", "avg_sgd", "nagd"};
    if (!kinds.count(cfg.algorithm.kind))
      throw ConfigError("algorithm must be one of shb, sgd, avg_sgd, nagd");
  }

  {
    if (!root.contains("potential")) throw ConfigError("missing config key 'potential'");
    const json& p = root["potential"];
    check_keys(p, "potential.", {"kind", "matrix", "p", "a", "b"});
    cfg.potential.kind = get_str(p, "potential.", "kind");
    if (p.contains("matrix")) {
      for (const auto& row : p["matrix"]) {
        cfg.potential.matrix.emplace_back();
        for (const auto& v : row) cfg.potential.matrix.back().push_back(v.get<double>());
      }
    }
    cfg.potential.p = get_num(p, "potential.", "p", 2.0);
    cfg.potential.a = get_num(p, "potential.", "a", 0.0);
    cfg.potential.b = get_num(p, "potential.", "b", 0.0);
  }

  {
    if (!root.contains("step")) throw ConfigError("missing config key 'step'");
    const json& s = root["step"];
    check_keys(s, "step.", {"gamma", "beta"});
    cfg.step_gamma = get_num(s, "step.", "gamma");
    cfg.step_beta = get_num(s, "step.", "beta");
  }

  if (root.contains("memory")) cfg.memory = parse_memory(root["memory"], "memory.");

  if (root.contains("noise")) {
    const json& n = root["noise"];
    check_keys(n, "noise.", {"kind", "sigma0"});
    const std::string kind = get_str(n, "noise.", "kind");
    const double s0 = get_num(n, "noise.", "sigma0", 0.0);
    if (kind == "zero") cfg.noise = NoiseModel::zero();
    else if (kind == "isotropic_gaussian") cfg.noise = NoiseModel::isotropic_gaussian(s0);
    else if (kind == "state_scaled_gaussian") cfg.noise = NoiseModel::state_scaled_gaussian(s0);
    else if (kind == "gradient_perturbation") cfg.noise = NoiseModel::gradient_perturbation(s0);
    else throw ConfigError("noise.kind must be zero, isotropic_gaussian, state_scaled_gaussian or gradient_perturbation");
  }

  if (root.contains("init")) {
    const json& i = root["init"];
    check_keys(i, "init.", {"x"});
    if (!i.contains("x") || !i["x"].is_array())
      throw ConfigError("init.x must be an array of numbers");
    cfg.init_x.clear();
    for (const auto& v : i["x"]) cfg.init_x.push_back(v.get<double>());
  }

  if (root.contains("horizon"))
    cfg.horizon = static_cast<std::int64_t>(get_num(root, "", "horizon"));
  if (cfg.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (root.contains("replicas"))
    cfg.replicas = static_cast<int>(get_num(root, "", "replicas"));
  if (cfg.replicas < 1) throw ConfigError("replicas must be >= 1");

  if (root.contains("checkpoints")) {
    const json& c = root["checkpoints"];
    check_keys(c, "checkpoints.", {"count", "spacing"});
    cfg.checkpoints.count = static_cast<int>(get_num(c, "checkpoints.", "count", 30.0));
    cfg.checkpoints.spacing = get_str(c, "checkpoints.", "spacing", "log");
  }

  if (root.contains("seed")) {
    const json& s = root["seed"];
    check_keys(s, "seed.", {"master"});
    cfg.master_seed = static_cast<std::uint64_t>(get_num(s, "seed.", "master", 0.0));
  }

  if (root.contains("lyapunov")) {
    if (!root["lyapunov"].is_boolean())
      throw ConfigError("config key 'lyapunov' must be a boolean");
    cfg.record_lyapunov = root["lyapunov"].get<bool>();
  }

  if (root.contains("fit_window")) {
    const json& w = root["fit_window"];
    check_keys(w, "fit_window.", {"lo", "hi"});
    cfg.fit_window = {static_cast<std::int64_t>(get_num(w, "fit_window.", "lo")),
                      static_cast<std::int64_t>(get_num(w, "fit_window.", "hi"))};
  }

  if (root.contains("trap")) {
    const json& t = root["trap"];
    check_keys(t, "trap.", {"inits", "sigmas", "algorithms"});
    TrapConfig tc;
    if (t.contains("inits")) {
      const json& i = t["inits"];
      check_keys(i, "trap.inits.", {"lo", "hi", "count"});
      tc.init_lo = get_num(i, "trap.inits.", "lo", -10.0);
      tc.init_hi = get_num(i, "trap.inits.", "hi", 10.0);
      tc.init_count = static_cast<int>(get_num(i, "trap.inits.", "count", 100.0));
    }
    if (t.contains("sigmas")) {
      tc.sigmas.clear();
      for (const auto& v : t["sigmas"]) tc.sigmas.push_back(v.get<double>());
    }
    if (t.contains("algorithms")) {
      for (const auto& a : t["algorithms"]) {
        check_keys(a, "trap.algorithms[].", {"algorithm", "memory", "label"});
        TrapAlgorithm ta;
        ta.algorithm = get_str(a, "trap.algorithms[].", "algorithm");
        if (a.contains("memory"))
          ta.memory = parse_memory(a["memory"], "trap.algorithms[].memory.");
        if (a.contains("label")) ta.label = get_str(a, "trap.algorithms[].", "label");
        if (ta.label.empty()) {
          ta.label = ta.algorithm;
          if (ta.memory) {
            std::ostringstream os;
            os << (ta.memory->kind == MemorySchedule::Kind::Exponential ? "_expo_r" : "_poly_r")
               << ta.memory->r;
            ta.label += os.str();
          }
        }
        tc.algorithms.push_back(std::move(ta));
      }
    }
    cfg.trap = std::move(tc);
  }

  return cfg;
}
}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json root;
  root["algorithm"] = algorithm.kind;

  json p;
  p["kind"] = potential.kind;
  if (potential.kind == "quadratic") p["matrix"] = potential.matrix;
  if (potential.kind == "power") p["p"] = potential.p;
  if (potential.kind == "double_well") {
    p["a"] = potential.a;
    p["b"] = potential.b;
  }
  root["potential"] = p;

  root["step"] = json{{"gamma", step_gamma}, {"beta", step_beta}};
  root["memory"] = memory_to_json(memory);
  root["noise"] = json{{"kind", noise.kind_name()}, {"sigma0", noise.sigma0}};
  root["init"] = json{{"x", init_x}};
  root["horizon"] = horizon;
  root["replicas"] = replicas;
  root["checkpoints"] = json{{"count", checkpoints.count}, {"spacing", checkpoints.spacing}};
  root["seed"] = json{{"master", master_seed}};
  root["lyapunov"] = record_lyapunov;
  if (fit_window)
    root["fit_window"] = json{{"lo", fit_window->first}, {"hi", fit_window->second}};
  if (trap) {
    json t;
    t["inits"] = json{{"lo", trap->init_lo}, {"hi", trap->init_hi}, {"count", trap->init_count}};
    t["sigmas"] = trap->sigmas;
    json algos = json::array();
    for (const auto& a : trap->algorithms) {
      json ja;
      ja["algorithm"] = a.algorithm;
      if (a.memory) ja["memory"] = memory_to_json(*a.memory);
      ja["label"] = a.label;
      algos.push_back(ja);
    }
    t["algorithms"] = algos;
    root["trap"] = t;
  }
  return root.dump(2);
}

std::string version_string() { return "shb 0.1.0"; }

}  // namespace shb
