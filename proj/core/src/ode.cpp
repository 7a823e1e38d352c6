#include "shb/ode.hpp"

#include <cmath>
#include <stdexcept>

namespace shb {

DampingFamily DampingFamily::constant(double gamma_bar) {
  if (!(gamma_bar >= 0.0))
    throw std::invalid_argument("DampingFamily: constant damping must be >= 0");
  return DampingFamily{Kind::Constant, gamma_bar};
}

DampingFamily DampingFamily::vanishing(double r) {
  if (!(r > 1.0))
    throw std::invalid_argument(
        "DampingFamily: vanishing damping needs r > 1 (Cabot's second "
        "condition fails otherwise)");
  return DampingFamily{Kind::Vanishing, r};
}

double DampingFamily::at(double t) const {
  return kind == Kind::Constant ? value : value / t;
}

ContinuousMemory ContinuousMemory::exponential(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("ContinuousMemory: r must be > 0");
  return ContinuousMemory{Kind::Exponential, r};
}

ContinuousMemory ContinuousMemory::polynomial(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("ContinuousMemory: r must be > 0");
  return ContinuousMemory{Kind::Polynomial, r};
}

double ContinuousMemory::at(double t) const {
  return kind == Kind::Exponential ? r : r / t;
}

namespace {

// RK4 over the generic 2d-dimensional first-order system.
template <typename Rhs>
OdeTrajectory integrate(const Rhs& rhs, std::span<const double> x0,
                        std::span<const double> v0, double t0, double t_end,
                        double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("ode: dt must be > 0");
  if (!(t_end >= t0)) throw std::invalid_argument("ode: t_end must be >= t0");
  const int d = static_cast<int>(x0.size());

  OdeTrajectory traj;
  Vec x(x0.begin(), x0.end()), v(v0.begin(), v0.end());
  traj.t.push_back(t0);
  traj.x.push_back(x);
  traj.v.push_back(v);

  Vec kx1(d), kv1(d), kx2(d), kv2(d), kx3(d), kv3(d), kx4(d), kv4(d);
  Vec xs(d), vs(d);

  double t = t0;
  while (t < t_end - 1e-15 * std::max(1.0, std::abs(t_end))) {
    const double h = std::min(dt, t_end - t);
    rhs(t, x, v, kx1, kv1);
    for (int i = 0; i < d; ++i) { xs[i] = x[i] + 0.5 * h * kx1[i]; vs[i] = v[i] + 0.5 * h * kv1[i]; }
    rhs(t + 0.5 * h, xs, vs, kx2, kv2);
    for (int i = 0; i < d; ++i) { xs[i] = x[i] + 0.5 * h * kx2[i]; vs[i] = v[i] + 0.5 * h * kv2[i]; }
    rhs(t + 0.5 * h, xs, vs, kx3, kv3);
    for (int i = 0; i < d; ++i) { xs[i] = x[i] + h * kx3[i]; vs[i] = v[i] + h * kv3[i]; }
    rhs(t + h, xs, vs, kx4, kv4);
    double mag = 0.0;
    for (int i = 0; i < d; ++i) {
      x[i] += h / 6.0 * (kx1[i] + 2.0 * (kx2[i] + kx3[i]) + kx4[i]);
      v[i] += h / 6.0 * (kv1[i] + 2.0 * (kv2[i] + kv3[i]) + kv4[i]);
      mag = std::max(mag, std::max(std::abs(x[i]), std::abs(v[i])));
    }
    if (!(mag < 1e100))
      throw std::runtime_error("ode: state became non-finite at t=" + std::to_string(t));
    t += h;
    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.v.push_back(v);
  }
  return traj;
}

}  // namespace

OdeTrajectory hbf_ode_integrate(const Potential& pot, const DampingFamily& damping,
                                std::span<const double> x0,
                                std::span<const double> v0, double t0,
                                double t_end, double dt) {
  if (damping.kind == DampingFamily::Kind::Vanishing && !(t0 > 0.0))
    throw std::invalid_argument("hbf_ode_integrate: vanishing damping needs t0 > 0");
  Vec g(pot.dim);
  auto rhs = [&](double t, const Vec& x, const Vec& v, Vec& dx, Vec& dv) {
    pot.grad(x, g);
    const double gam = damping.at(t);
    for (int i = 0; i < pot.dim; ++i) {
      dx[i] = v[i];
      dv[i] = -gam * v[i] - g[i];
    }
  };
  return integrate(rhs, x0, v0, t0, t_end, dt);
}

OdeTrajectory memory_ode_integrate(const Potential& pot,
                                   const ContinuousMemory& mem,
                                   std::span<const double> x0,
                                   std::span<const double> y0, double t0,
                                   double t_end, double dt) {
  if (mem.kind == ContinuousMemory::Kind::Polynomial && !(t0 > 0.0))
    throw std::invalid_argument("memory_ode_integrate: polynomial memory needs t0 > 0");
  Vec g(pot.dim);
  auto rhs = [&](double t, const Vec& x, const Vec& y, Vec& dx, Vec& dy) {
    pot.grad(x, g);
    const double rt = mem.at(t);
    for (int i = 0; i < pot.dim; ++i) {
      dx[i] = -y[i];
      dy[i] = rt * (g[i] - y[i]);
    }
  };
  return integrate(rhs, x0, y0, t0, t_end, dt);
}

double time_change_tau(const TimeKernel& kernel, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("time_change_tau: s must be >= 0");
  if (kernel.kind == TimeKernel::Kind::Exponential)
    return std::sqrt(kernel.param) * s;
  return s * s / (4.0 * (kernel.param + 1.0));
}

double polynomial_kernel_damping(double alpha) { return 2.0 * alpha + 1.0; }

}  // namespace shb
