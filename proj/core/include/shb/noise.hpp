#pragma once

#include <span>
#include <string>

#include "shb/potential.hpp"
#include "shb/rng.hpp"

namespace shb {

// Martingale-increment generators.  All models are conditionally centered;
// the Gaussian ones are sub-Gaussian and uniformly elliptic.
struct NoiseModel {
  enum class Kind {
    Zero,
    IsotropicGaussian,    // sigma0 * N(0, I)
    StateScaledGaussian,  // per-coordinate sd sigma0 * max(|1 + f(x)|, 0.1)
    GradientPerturbation  // dM = grad f(x) - (grad f(x) + xi) = -xi
  };

  Kind kind = Kind::Zero;
  double sigma0 = 0.0;

  static NoiseModel zero();
  static NoiseModel isotropic_gaussian(double sigma0);
  static NoiseModel state_scaled_gaussian(double sigma0);
  static NoiseModel gradient_perturbation(double sigma0);

  std::string kind_name() const;
};

// One draw of dM_{n+1} at state x.  Zero draws nothing from the stream, so
// noiseless runs are exactly reproducible regardless of model bookkeeping.
void sample_increment(const NoiseModel& model, const Potential& pot,
                      std::span<const double> x, RngStream& rng,
                      std::span<double> out);

}  // namespace shb
