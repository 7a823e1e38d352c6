#pragma once

#include <span>
#include <string>
#include <vector>

#include "shb/linalg.hpp"
#include "shb/potential.hpp"

namespace shb {

// Damping coefficient t -> gamma_t of the second-order dynamics
// x'' + gamma_t x' + grad f(x) = 0.  Constant damping satisfies both of
// Cabot's convergence conditions outright; the vanishing family gamma_t =
// r/t needs r > 1 for the second one.
struct DampingFamily {
  enum class Kind { Constant, Vanishing };
  Kind kind = Kind::Constant;
  double value = 1.0;  // gamma-bar, or r

  static DampingFamily constant(double gamma_bar);
  static DampingFamily vanishing(double r);

  double at(double t) const;
};

// Continuous memory coefficient r_t of the first-order form
// x' = -y, y' = r_t (grad f(x) - y): constant r, or r/t.
struct ContinuousMemory {
  enum class Kind { Exponential, Polynomial };
  Kind kind = Kind::Exponential;
  double r = 1.0;

  static ContinuousMemory exponential(double r);
  static ContinuousMemory polynomial(double r);

  double at(double t) const;
};

struct OdeTrajectory {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<Vec> v;  // velocity (or the memory variable y)

  size_t size() const { return t.size(); }
  const Vec& x_back() const { return x.back(); }
  const Vec& v_back() const { return v.back(); }
};

// Classical RK4 on the first-order system (x, v), fixed step dt (the final
// step is shortened to land exactly on t_end).  Aborts on non-finite state.
OdeTrajectory hbf_ode_integrate(const Potential& pot, const DampingFamily& damping,
                                std::span<const double> x0,
                                std::span<const double> v0, double t0,
                                double t_end, double dt);

OdeTrajectory memory_ode_integrate(const Potential& pot,
                                   const ContinuousMemory& mem,
                                   std::span<const double> x0,
                                   std::span<const double> y0, double t0,
                                   double t_end, double dt);

// Time change tau(s) mapping the memory-form clock onto the damped-ODE
// clock: sqrt(lambda) s for the exponential kernel family, s^2/(4(alpha+1))
// for the polynomial one.
struct TimeKernel {
  enum class Kind { Exponential, Polynomial };
  Kind kind = Kind::Exponential;
  double param = 1.0;  // lambda, or alpha
};

double time_change_tau(const TimeKernel& kernel, double s);

// Damping coefficient of the rescaled polynomial-kernel trajectory is
// (2 alpha + 1)/s.
double polynomial_kernel_damping(double alpha);

}  // namespace shb
