#include "shb/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace shb {

namespace {
void require_positive(double sigma0, const char* what) {
  if (!(sigma0 > 0.0))
    throw std::invalid_argument(std::string(what) + ": sigma0 must be > 0");
}
}  // namespace

NoiseModel NoiseModel::zero() { return NoiseModel{Kind::Zero, 0.0}; }

NoiseModel NoiseModel::isotropic_gaussian(double sigma0) {
  require_positive(sigma0, "isotropic_gaussian");
  return NoiseModel{Kind::IsotropicGaussian, sigma0};
}

NoiseModel NoiseModel::state_scaled_gaussian(double sigma0) {
  require_positive(sigma0, "state_scaled_gaussian");
  return NoiseModel{Kind::StateScaledGaussian, sigma0};
}

NoiseModel NoiseModel::gradient_perturbation(double sigma0) {
  require_positive(sigma0, "gradient_perturbation");
  return NoiseModel{Kind::GradientPerturbation, sigma0};
}

std::string NoiseModel::kind_name() const {
  switch (kind) {
    case Kind::Zero: return "zero";
    case Kind::IsotropicGaussian: return "isotropic_gaussian";
    case Kind::StateScaledGaussian: return "state_scaled_gaussian";
    case Kind::GradientPerturbation: return "gradient_perturbation";
  }
  return "?";
}

void sample_increment(const NoiseModel& model, const Potential& pot,
                      std::span<const double> x, RngStream& rng,
                      std::span<double> out) {
  switch (model.kind) {
    case NoiseModel::Kind::Zero:
      for (double& v : out) v = 0.0;
      return;
    case NoiseModel::Kind::IsotropicGaussian:
      for (double& v : out) v = model.sigma0 * rng.gaussian();
      return;
    case NoiseModel::Kind::StateScaledGaussian: {
      // f can be negative (the double well does): clamp the scale away from
      // zero so the noise stays elliptic.
      const double scale = std::max(std::abs(1.0 + pot.f(x)), 0.1);
      const double sd = model.sigma0 * scale;
      for (double& v : out) v = sd * rng.gaussian();
      return;
    }
    case NoiseModel::Kind::GradientPerturbation:
      // dM = grad f - (grad f + xi) = -xi
      for (double& v : out) v = -(model.sigma0 * rng.gaussian());
      return;
  }
}

}  // namespace shb
