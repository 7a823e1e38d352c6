#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>

#include "shb/noise.hpp"
#include "shb/potential.hpp"
#include "shb/schedules.hpp"

namespace shb {

// Iterate pair Z_n = (X_n, Y_n) with its counter and the running step-sum
// Gamma_n, accumulated in the same order the schedule accumulates it.
struct ShbState {
  std::int64_t n = 0;
  Vec x;
  Vec y;
  double big_gamma = 0.0;

  static ShbState init(Vec x0) {
    ShbState s;
    s.y.assign(x0.size(), 0.0);
    s.x = std::move(x0);
    return s;
  }
};

// Raised when an iterate leaves the finite range: a divergent configuration,
// not a bug.  Carries the step index at which it happened.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(std::int64_t step, double magnitude)
      : std::runtime_error("iterate diverged at step " + std::to_string(step) +
                           " (magnitude " + std::to_string(magnitude) + ")"),
        step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

inline constexpr double kDivergenceThreshold = 1e12;

// Scratch buffers so the hot loop performs no allocation.
struct StepWorkspace {
  Vec grad;
  Vec dm;
  Vec scratch;
  explicit StepWorkspace(int dim)
      : grad(dim, 0.0), dm(dim, 0.0), scratch(dim, 0.0) {}
};

// One transition of
//   X_{n+1} = X_n - gamma_{n+1} Y_n
//   Y_{n+1} = Y_n + gamma_{n+1} r_n (grad f(X_n) - Y_n) + gamma_{n+1} r_n dM_{n+1}
// The gradient is evaluated once, at X_n.
void shb_step_inplace(ShbState& state, const Potential& pot,
                      const StepSchedule& sched, const MemorySchedule& mem,
                      const NoiseModel& noise, RngStream& rng,
                      StepWorkspace& ws);

ShbState shb_step(const ShbState& state, const Potential& pot,
                  const StepSchedule& sched, const MemorySchedule& mem,
                  const NoiseModel& noise, RngStream& rng);

// Applies shb_step `horizon` times; the recorder (may be empty) sees the
// state after every step whose index it asked for.
using Recorder = std::function<void(const ShbState&)>;

ShbState shb_run(ShbState state, std::int64_t horizon, const Potential& pot,
                 const StepSchedule& sched, const MemorySchedule& mem,
                 const NoiseModel& noise, RngStream& rng,
                 const Recorder& recorder = {});

// (X_n, Y_n / sqrt(r_n))
std::pair<Vec, Vec> speed_normalized(const ShbState& state,
                                     const MemorySchedule& mem,
                                     const StepSchedule& sched);

// Z_n / sqrt(gamma_n), n >= 1.
std::pair<Vec, Vec> rescaled(const ShbState& state, const StepSchedule& sched);

}  // namespace shb
