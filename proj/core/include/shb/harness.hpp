#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "shb/config.hpp"
#include "shb/linalg.hpp"
#include "shb/noise.hpp"
#include "shb/potential.hpp"
#include "shb/schedules.hpp"
#include "shb/shb.hpp"

namespace shb {

// Raised when more than 1% of replicas diverge.
class DivergenceBudgetError : public std::runtime_error {
 public:
  DivergenceBudgetError(int divergent, int total)
      : std::runtime_error(std::to_string(divergent) + " of " +
                           std::to_string(total) +
                           " replicas diverged (budget is 1%)"),
        divergent_(divergent),
        total_(total) {}
  int divergent() const { return divergent_; }
  int total() const { return total_; }

 private:
  int divergent_, total_;
};

struct SummaryRow {
  std::int64_t n = 0;
  double mse_x = 0.0;  // mean |X_n - x*|^2
  double mse_y = 0.0;  // mean |Y_n|^2 (0 for first-order baselines)
  double se_x = 0.0;   // sample std / sqrt(R)
  double se_y = 0.0;
  std::optional<double> mean_v;  // Lyapunov value, when recorded
  std::optional<double> se_v;
  int replicas = 0;  // survivors entering the means
};

struct McResult {
  std::vector<SummaryRow> rows;
  Vec x_star;
  int divergent = 0;
  int replicas = 0;
};

// R independent replicas on streams 0..R-1, errors measured against the
// potential's minimizer (computed from critical_points_1d when absent) at
// each checkpoint.  Aggregation is a deterministic reduce in replica order,
// so the result does not depend on the worker count.  Throws
// DivergenceBudgetError if more than 1% of replicas diverge.
McResult mc_expected_error(const ExperimentConfig& cfg);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

enum class RateSeries { MseX, MseY };

// Least-squares slope of log(mean error) against log(n) over checkpoints in
// [lo, hi].  Requires >= 5 checkpoints in the window and positive means.
RateFit fit_rate(const std::vector<SummaryRow>& rows, std::int64_t lo,
                 std::int64_t hi, RateSeries series = RateSeries::MseX);

struct CltResult {
  Matrix covariance;  // sample covariance of (X_n, Y_n)/sqrt(gamma_n), 2d x 2d
  Vec mean;           // should be ~ 0
  int divergent = 0;
  int replicas = 0;
};

CltResult clt_covariance(const ExperimentConfig& cfg);

struct TrapRow {
  std::string algorithm;
  double sigma = 0.0;
  double init = 0.0;
  double success_rate = 0.0;
};

struct TrapResult {
  std::vector<TrapRow> rows;         // per (algorithm, sigma, init)
  std::vector<TrapRow> init_averaged;  // init field unused (set to NaN)
  double x_star = 0.0;
  std::vector<double> critical_points;
};

// Section-6 style study: for each (algorithm, sigma, init), the fraction of
// replicas ending within distance 1 of the global minimizer after `horizon`
// steps.  The minimizer is located at runtime from critical_points_1d (the
// smallest-f root); divergent replicas count as failures.  All algorithms
// consume identical noise streams for a given (sigma, init, replica).
TrapResult trap_experiment(const ExperimentConfig& cfg);

// V(x, y) = (a + b r_prev) f(x) + (a/(2 r_prev)) |y|^2 - b <grad f(x), y>.
double lyapunov_value(const Potential& pot, double a, double b, double r_prev,
                      std::span<const double> x, std::span<const double> y);

// Coefficients (a, b) = (2 max(1/2, |D2f|/(1 - c_r), r_inf (c_f - 1)), 1),
// which satisfy the strict mean-descent inequality.  Requires c_f,
// hess_sup_norm and c_r < 1.
std::pair<double, double> lyapunov_ab(const Potential& pot,
                                      const MemorySchedule& mem);

// Worker pool: SHB_WORKERS overrides the thread count and never affects
// results.
int worker_count();
void parallel_for(int n_tasks, const std::function<void(int)>& body);

// Resolve the target point errors are measured against.
Vec resolve_minimizer(const Potential& pot);

}  // namespace shb
