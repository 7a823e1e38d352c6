#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shb/linalg.hpp"
#include "shb/noise.hpp"
#include "shb/potential.hpp"
#include "shb/schedules.hpp"

namespace shb {

// Raised on malformed configuration (unknown key, bad value, wrong type).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PotentialConfig {
  std::string kind;  // quadratic | power | double_well  (custom: API only)
  std::vector<std::vector<double>> matrix;  // quadratic
  double p = 2.0;                           // power
  double a = 0.0, b = 0.0;                  // double_well

  Potential build() const;
};

struct AlgorithmConfig {
  std::string kind = "shb";  // shb | sgd | avg_sgd | nagd
};

struct CheckpointPlan {
  int count = 30;
  std::string spacing = "log";  // log | linear

  std::vector<std::int64_t> indices(std::int64_t horizon) const;
};

struct TrapAlgorithm {
  std::string algorithm;                 // shb | sgd | avg_sgd | nagd
  std::optional<MemorySchedule> memory;  // shb only
  std::string label;                     // defaults to a descriptive name
};

struct TrapConfig {
  double init_lo = -10.0;
  double init_hi = 10.0;
  int init_count = 100;
  std::vector<double> sigmas{0.1, 1.0, 2.0};
  std::vector<TrapAlgorithm> algorithms;
};

struct ExperimentConfig {
  AlgorithmConfig algorithm;
  PotentialConfig potential;
  double step_gamma = 1.0;
  double step_beta = 1.0;
  MemorySchedule memory = MemorySchedule::exponential(1.0);
  NoiseModel noise = NoiseModel::zero();
  Vec init_x{0.0};
  std::int64_t horizon = 1000;
  int replicas = 1;
  CheckpointPlan checkpoints;
  std::uint64_t master_seed = 0;
  bool record_lyapunov = false;
  std::optional<std::pair<std::int64_t, std::int64_t>> fit_window;
  std::optional<TrapConfig> trap;

  StepSchedule step_schedule() const { return StepSchedule(step_gamma, step_beta); }

  // Strict parse: unknown keys are rejected with the offending key name.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  std::string to_json_text() const;
};

std::string version_string();

}  // namespace shb
