#include "shb/shb.hpp"

#include <cmath>

namespace shb {

namespace {
inline void check_finite(const ShbState& s) {
  double m = 0.0;
  for (double v : s.x) m = std::max(m, std::abs(v));
  for (double v : s.y) m = std::max(m, std::abs(v));
  if (!(m <= kDivergenceThreshold)) throw DivergedError(s.n, m);
}
}  // namespace

void shb_step_inplace(ShbState& state, const Potential& pot,
                      const StepSchedule& sched, const MemorySchedule& mem,
                      const NoiseModel& noise, RngStream& rng,
                      StepWorkspace& ws) {
  const double g = sched.gamma(state.n + 1);
  const double rn = mem.r_at(state.n, state.big_gamma, sched.gamma(1));
  const double gr = g * rn;

  pot.grad(state.x, ws.grad);
  sample_increment(noise, pot, state.x, rng, ws.dm);

  const int d = pot.dim;
  for (int i = 0; i < d; ++i) {
    const double xi = state.x[i];
    const double yi = state.y[i];
    state.x[i] = xi - g * yi;
    state.y[i] = yi + gr * (ws.grad[i] - yi) + gr * ws.dm[i];
  }
  state.n += 1;
  state.big_gamma += g;
  check_finite(state);
}

ShbState shb_step(const ShbState& state, const Potential& pot,
                  const StepSchedule& sched, const MemorySchedule& mem,
                  const NoiseModel& noise, RngStream& rng) {
  ShbState next = state;
  StepWorkspace ws(pot.dim);
  shb_step_inplace(next, pot, sched, mem, noise, rng, ws);
  return next;
}

ShbState shb_run(ShbState state, std::int64_t horizon, const Potential& pot,
                 const StepSchedule& sched, const MemorySchedule& mem,
                 const NoiseModel& noise, RngStream& rng,
                 const Recorder& recorder) {
  if (horizon < 0) throw std::invalid_argument("shb_run: horizon must be >= 0");
  StepWorkspace ws(pot.dim);
  for (std::int64_t k = 0; k < horizon; ++k) {
    shb_step_inplace(state, pot, sched, mem, noise, rng, ws);
    if (recorder) recorder(state);
  }
  return state;
}

std::pair<Vec, Vec> speed_normalized(const ShbState& state,
                                     const MemorySchedule& mem,
                                     const StepSchedule& sched) {
  const double rn = mem.r_at(state.n, state.big_gamma, sched.gamma(1));
  if (!(rn > 0.0))
    throw std::invalid_argument("speed_normalized: r_n must be > 0");
  const double inv = 1.0 / std::sqrt(rn);
  Vec ys = state.y;
  for (double& v : ys) v *= inv;
  return {state.x, std::move(ys)};
}

std::pair<Vec, Vec> rescaled(const ShbState& state, const StepSchedule& sched) {
  if (state.n < 1) throw std::invalid_argument("rescaled: n must be >= 1");
  const double inv = 1.0 / std::sqrt(sched.gamma(state.n));
  Vec xs = state.x;
  Vec ys = state.y;
  for (double& v : xs) v *= inv;
  for (double& v : ys) v *= inv;
  return {std::move(xs), std::move(ys)};
}

}  // namespace shb
