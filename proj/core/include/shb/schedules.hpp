#pragma once

#include <cstdint>
#include <string>

namespace shb {

// Step sizes gamma_n = gamma * n^(-beta), beta in (0,1].  Partial sums
// Gamma_n = sum_{k<=n} gamma_k and Gamma2_n = sum_{k<=n} gamma_k^2 are
// maintained by an advance-only cursor so that sequential access is O(1)
// per step.  A schedule instance is a mutable cache: one per replica, or
// confine concurrent use to distinct copies.
class StepSchedule {
 public:
  StepSchedule(double gamma_scale, double beta);

  double gamma_scale() const { return gamma_; }
  double beta() const { return beta_; }

  // gamma_n, n >= 1
  double gamma(std::int64_t n) const;

  // Gamma_n with Gamma_0 = 0
  double Gamma(std::int64_t n);
  // Gamma^(2)_n with Gamma^(2)_0 = 0
  double Gamma2(std::int64_t n);

 private:
  void advance_to(std::int64_t n);
  void reset_cursor();

  double gamma_;
  double beta_;
  std::int64_t cursor_n_ = 0;
  double sum_ = 0.0;
  double sum2_ = 0.0;
};

// Memory sequence r_n.  Exponential memory keeps r_n = r; polynomial memory
// uses r_n = r / Gamma_n for n >= 1 with the convention r_0 = r / gamma_1
// (the recursion needs r_0 but Gamma_0 = 0; treating Gamma_0 as gamma_1
// keeps r_n finite and non-increasing from the first step).
struct MemorySchedule {
  enum class Kind { Exponential, Polynomial };

  Kind kind = Kind::Exponential;
  double r = 1.0;

  static MemorySchedule exponential(double r);
  static MemorySchedule polynomial(double r);

  // r_n given the already-known Gamma_n and gamma_1 (hot-path form).
  double r_at(std::int64_t n, double Gamma_n, double gamma_1) const;

  // Limit of (1/(2 gamma_{n+1}))(1/r_n - 1/r_{n-1}): 0 for exponential
  // memory, 1/(2r) for polynomial memory.
  double c_r_limit() const;
  // r or 0.
  double r_inf() const;

  std::string kind_name() const;
};

double memory_r(const MemorySchedule& mem, StepSchedule& sched, std::int64_t n);

// Finite-n estimate (1/(2 gamma_{n+1}))(1/r_n - 1/r_{n-1}), n >= 1.
double cr_estimate(const MemorySchedule& mem, StepSchedule& sched, std::int64_t n);

// Spectral-gap constant of the 2x2 heavy-ball block:
// alpha_r = r (1 - sqrt(1 - 4 lambda / r)) for r >= 4 lambda, else r.
double alpha_r(double r, double lambda);

// Rate threshold (1+beta)/(2(1-beta)) for polynomial memory, beta < 1.
double poly_rate_threshold(double beta);

}  // namespace shb
