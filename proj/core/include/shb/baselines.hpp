#pragma once

#include <cstdint>
#include <string>

#include "shb/noise.hpp"
#include "shb/potential.hpp"
#include "shb/schedules.hpp"
#include "shb/shb.hpp"

namespace shb {

// Comparison algorithms: Robbins-Monro SGD, Polyak-Ruppert averaged SGD and
// a stochastic Nesterov accelerated gradient descent (the deterministic
// momentum recursion with the gradient replaced by its unbiased evaluation).
struct BaselineState {
  enum class Variant { Sgd, AvgSgd, Nagd };

  Variant variant = Variant::Sgd;
  std::int64_t n = 0;
  Vec x;
  // avg_sgd: running average of all iterates produced so far.
  // nagd: previous iterate x_{n-1}.
  Vec aux;

  static BaselineState sgd(Vec x0);
  static BaselineState avg_sgd(Vec x0);
  static BaselineState nagd(Vec x0);

  std::string variant_name() const;
};

// x_{n+1} = x_n - gamma_{n+1} (grad f(x_n) + dM_{n+1})
void sgd_step(BaselineState& s, const Potential& pot, const StepSchedule& sched,
              const NoiseModel& noise, RngStream& rng, StepWorkspace& ws);

// Underlying SGD step plus the Cesaro average
// xbar_{n+1} = xbar_n + (x_{n+1} - xbar_n)/(n+1).
void avg_sgd_step(BaselineState& s, const Potential& pot,
                  const StepSchedule& sched, const NoiseModel& noise,
                  RngStream& rng, StepWorkspace& ws);

// v_n = x_n + ((n-1)/(n+2)) (x_n - x_{n-1});
// x_{n+1} = v_n - gamma_{n+1} (grad f(v_n) + dM_{n+1}).
// One gradient evaluation per step; noise drawn at v_n.
void nagd_step(BaselineState& s, const Potential& pot,
               const StepSchedule& sched, const NoiseModel& noise,
               RngStream& rng, StepWorkspace& ws);

void baseline_step(BaselineState& s, const Potential& pot,
                   const StepSchedule& sched, const NoiseModel& noise,
                   RngStream& rng, StepWorkspace& ws);

}  // namespace shb
