#include "shb/schedules.hpp"

#include <cmath>
#include <stdexcept>

namespace shb {

StepSchedule::StepSchedule(double gamma_scale, double beta)
    : gamma_(gamma_scale), beta_(beta) {
  if (!(gamma_scale > 0.0))
    throw std::invalid_argument("StepSchedule: gamma must be > 0");
  if (!(beta > 0.0) || beta > 1.0)
    throw std::invalid_argument("StepSchedule: beta must lie in (0, 1]");
}

double StepSchedule::gamma(std::int64_t n) const {
  if (n < 1) throw std::invalid_argument("StepSchedule::gamma: n must be >= 1");
  if (beta_ == 1.0) return gamma_ / static_cast<double>(n);
  return gamma_ * std::pow(static_cast<double>(n), -beta_);
}

void StepSchedule::reset_cursor() {
  cursor_n_ = 0;
  sum_ = 0.0;
  sum2_ = 0.0;
}

void StepSchedule::advance_to(std::int64_t n) {
  if (n < cursor_n_) reset_cursor();
  while (cursor_n_ < n) {
    ++cursor_n_;
    const double g = gamma(cursor_n_);
    sum_ += g;
    sum2_ += g * g;
  }
}

double StepSchedule::Gamma(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("StepSchedule::Gamma: n must be >= 0");
  advance_to(n);
  return sum_;
}

double StepSchedule::Gamma2(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("StepSchedule::Gamma2: n must be >= 0");
  advance_to(n);
  return sum2_;
}

MemorySchedule MemorySchedule::exponential(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("MemorySchedule: r must be > 0");
  return MemorySchedule{Kind::Exponential, r};
}

MemorySchedule MemorySchedule::polynomial(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("MemorySchedule: r must be > 0");
  return MemorySchedule{Kind::Polynomial, r};
}

double MemorySchedule::r_at(std::int64_t n, double Gamma_n, double gamma_1) const {
  if (kind == Kind::Exponential) return r;
  if (n == 0) return r / gamma_1;
  return r / Gamma_n;
}

double MemorySchedule::c_r_limit() const {
  return kind == Kind::Exponential ? 0.0 : 1.0 / (2.0 * r);
}

double MemorySchedule::r_inf() const {
  return kind == Kind::Exponential ? r : 0.0;
}

std::string MemorySchedule::kind_name() const {
  return kind == Kind::Exponential ? "exponential" : "polynomial";
}

double memory_r(const MemorySchedule& mem, StepSchedule& sched, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("memory_r: n must be >= 0");
  if (mem.kind == MemorySchedule::Kind::Exponential) return mem.r;
  return mem.r_at(n, sched.Gamma(n), sched.gamma(1));
}

double cr_estimate(const MemorySchedule& mem, StepSchedule& sched, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("cr_estimate: n must be >= 1");
  const double rn = memory_r(mem, sched, n);
  const double rprev = memory_r(mem, sched, n - 1);
  return (1.0 / rn - 1.0 / rprev) / (2.0 * sched.gamma(n + 1));
}

double alpha_r(double r, double lambda) {
  if (!(r > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("alpha_r: r and lambda must be > 0");
  if (r >= 4.0 * lambda) return r * (1.0 - std::sqrt(1.0 - 4.0 * lambda / r));
  return r;
}

double poly_rate_threshold(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("poly_rate_threshold: beta must lie in (0, 1)");
  return (1.0 + beta) / (2.0 * (1.0 - beta));
}

}  // namespace shb
