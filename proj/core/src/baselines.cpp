#include "shb/baselines.hpp"

#include <cmath>

namespace shb {

namespace {
inline void check_finite(std::int64_t n, const Vec& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (!(m <= kDivergenceThreshold)) throw DivergedError(n, m);
}
}  // namespace

BaselineState BaselineState::sgd(Vec x0) {
  BaselineState s;
  s.variant = Variant::Sgd;
  s.x = std::move(x0);
  return s;
}

BaselineState BaselineState::avg_sgd(Vec x0) {
  BaselineState s;
  s.variant = Variant::AvgSgd;
  s.aux = x0;  // overwritten by the first update, which divides by 1
  s.x = std::move(x0);
  return s;
}

BaselineState BaselineState::nagd(Vec x0) {
  BaselineState s;
  s.variant = Variant::Nagd;
  s.n = 1;  // iterate convention x_1 = x_0, momentum vanishes on step one
  s.aux = x0;
  s.x = std::move(x0);
  return s;
}

std::string BaselineState::variant_name() const {
  switch (variant) {
    case Variant::Sgd: return "sgd";
    case Variant::AvgSgd: return "avg_sgd";
    case Variant::Nagd: return "nagd";
  }
  return "?";
}

void sgd_step(BaselineState& s, const Potential& pot, const StepSchedule& sched,
              const NoiseModel& noise, RngStream& rng, StepWorkspace& ws) {
  const double g = sched.gamma(s.n + 1);
  pot.grad(s.x, ws.grad);
  sample_increment(noise, pot, s.x, rng, ws.dm);
  for (int i = 0; i < pot.dim; ++i) s.x[i] -= g * (ws.grad[i] + ws.dm[i]);
  s.n += 1;
  check_finite(s.n, s.x);
}

void avg_sgd_step(BaselineState& s, const Potential& pot,
                  const StepSchedule& sched, const NoiseModel& noise,
                  RngStream& rng, StepWorkspace& ws) {
  sgd_step(s, pot, sched, noise, rng, ws);
  const double w = 1.0 / static_cast<double>(s.n);
  for (int i = 0; i < pot.dim; ++i) s.aux[i] += (s.x[i] - s.aux[i]) * w;
}

void nagd_step(BaselineState& s, const Potential& pot,
               const StepSchedule& sched, const NoiseModel& noise,
               RngStream& rng, StepWorkspace& ws) {
  const double g = sched.gamma(s.n + 1);
  const double mom = static_cast<double>(s.n - 1) / static_cast<double>(s.n + 2);

  Vec& v = ws.scratch;
  for (int i = 0; i < pot.dim; ++i)
    v[i] = s.x[i] + mom * (s.x[i] - s.aux[i]);
  pot.grad(v, ws.grad);
  sample_increment(noise, pot, v, rng, ws.dm);

  for (int i = 0; i < pot.dim; ++i) {
    const double xnew = v[i] - g * (ws.grad[i] + ws.dm[i]);
    s.aux[i] = s.x[i];
    s.x[i] = xnew;
  }
  s.n += 1;
  check_finite(s.n, s.x);
}

void baseline_step(BaselineState& s, const Potential& pot,
                   const StepSchedule& sched, const NoiseModel& noise,
                   RngStream& rng, StepWorkspace& ws) {
  switch (s.variant) {
    case BaselineState::Variant::Sgd: sgd_step(s, pot, sched, noise, rng, ws); break;
    case BaselineState::Variant::AvgSgd: avg_sgd_step(s, pot, sched, noise, rng, ws); break;
    case BaselineState::Variant::Nagd: nagd_step(s, pot, sched, noise, rng, ws); break;
  }
}

}  // namespace shb
