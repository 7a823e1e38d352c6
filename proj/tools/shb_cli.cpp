// Command line driver: Monte-Carlo runs, rate fits, CLT covariance
// estimation, trap-escape studies, reference ODE trajectories and the
// closed-form quadratic analysis, all emitting CSV plus a JSON metadata
// sidecar.
//
// Exit codes: 0 success, 2 config error, 3 divergence failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "shb/config.hpp"
#include "shb/csv.hpp"
#include "shb/harness.hpp"
#include "shb/ode.hpp"
#include "shb/quad_analysis.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

json base_metadata(const shb::ExperimentConfig& cfg) {
  json meta;
  meta["version"] = shb::version_string();
  meta["seed"] = cfg.master_seed;
  meta["config"] = json::parse(cfg.to_json_text());
  meta["notes"] = json::array();
  meta["notes"].push_back(
      "polynomial memory uses the convention r_0 = r / gamma_1 (Gamma_0 "
      "treated as gamma_1)");
  return meta;
}

void write_metadata(const std::string& csv_path, const json& meta) {
  std::ofstream f(csv_path + ".meta.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write metadata sidecar");
  f << meta.dump(2) << "\n";
}

std::vector<double> row_values(const shb::SummaryRow& r, bool with_v) {
  std::vector<double> vals{static_cast<double>(r.n), r.mse_x, r.mse_y, r.se_x,
                           r.se_y};
  if (with_v) {
    vals.push_back(r.mean_v.value_or(std::nan("")));
    vals.push_back(r.se_v.value_or(std::nan("")));
  }
  return vals;
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            bool fit_footer) {
  auto cfg = shb::ExperimentConfig::from_file(config_path);
  auto res = shb::mc_expected_error(cfg);

  const bool with_v = cfg.record_lyapunov;
  std::vector<std::string> header{"n", "mse_x", "mse_y", "se_x", "se_y"};
  if (with_v) {
    header.push_back("mean_v");
    header.push_back("se_v");
  }
  shb::CsvWriter csv(header);
  for (const auto& r : res.rows) csv.add_row(row_values(r, with_v));

  json meta = base_metadata(cfg);
  meta["x_star"] = res.x_star;
  meta["divergent_replicas"] = res.divergent;

  if (fit_footer) {
    const auto [lo, hi] = cfg.fit_window.value_or(
        std::make_pair(cfg.horizon / 10, cfg.horizon));
    const auto fx = shb::fit_rate(res.rows, lo, hi, shb::RateSeries::MseX);
    shb::RateFit fy;
    bool have_y = cfg.algorithm.kind == "shb";
    if (have_y) fy = shb::fit_rate(res.rows, lo, hi, shb::RateSeries::MseY);
    csv.add_raw_row({"slope", shb::CsvWriter::format(fx.slope),
                     have_y ? shb::CsvWriter::format(fy.slope) : "",
                     shb::CsvWriter::format(fx.r2),
                     have_y ? shb::CsvWriter::format(fy.r2) : ""});
    meta["fit"] = {{"window_lo", lo},
                   {"window_hi", hi},
                   {"slope_x", fx.slope},
                   {"intercept_x", fx.intercept},
                   {"r2_x", fx.r2}};
    if (have_y) {
      meta["fit"]["slope_y"] = fy.slope;
      meta["fit"]["r2_y"] = fy.r2;
    }
  }

  csv.write_file(out_path);
  write_metadata(out_path, meta);
  std::cout << csv.str();
  return kExitOk;
}

int cmd_clt(const std::string& config_path, const std::string& out_path) {
  auto cfg = shb::ExperimentConfig::from_file(config_path);
  auto res = shb::clt_covariance(cfg);

  const int D2 = res.covariance.n();
  std::vector<std::string> header{"i", "j", "cov", "mean_i", "mean_j"};
  shb::CsvWriter csv(header);
  for (int i = 0; i < D2; ++i)
    for (int j = 0; j < D2; ++j)
      csv.add_row({static_cast<double>(i), static_cast<double>(j),
                   res.covariance(i, j), res.mean[i], res.mean[j]});

  json meta = base_metadata(cfg);
  meta["divergent_replicas"] = res.divergent;
  meta["rescaling"] = "Z_n / sqrt(gamma_n)";
  csv.write_file(out_path);
  write_metadata(out_path, meta);
  std::cout << csv.str();
  return kExitOk;
}

int cmd_trap(const std::string& config_path, const std::string& out_path) {
  auto cfg = shb::ExperimentConfig::from_file(config_path);
  auto res = shb::trap_experiment(cfg);

  shb::CsvWriter csv({"algorithm", "sigma", "init", "success_rate"});
  for (const auto& r : res.rows)
    csv.add_raw_row({r.algorithm, shb::CsvWriter::format(r.sigma),
                     shb::CsvWriter::format(r.init),
                     shb::CsvWriter::format(r.success_rate)});

  json meta = base_metadata(cfg);
  meta["x_star"] = res.x_star;
  meta["critical_points"] = res.critical_points;
  meta["notes"].push_back(
      "success target is the runtime global minimizer (smallest f among the "
      "critical points), never a hard-coded location");
  json avg = json::array();
  for (const auto& r : res.init_averaged) {
    avg.push_back({{"algorithm", r.algorithm},
                   {"sigma", r.sigma},
                   {"success_rate", r.success_rate}});
    std::cerr << "avg  " << r.algorithm << "  sigma=" << r.sigma << "  "
              << r.success_rate << "\n";
  }
  meta["init_averaged"] = avg;
  csv.write_file(out_path);
  write_metadata(out_path, meta);
  std::cout << csv.str();
  return kExitOk;
}

int cmd_ode(const std::string& form, double lambda, double value, double r,
            double x0, double v0, double t0, double t_end, double dt,
            const std::string& out_path) {
  shb::Potential pot = shb::make_quadratic(shb::Matrix(1, {lambda}));
  shb::OdeTrajectory traj;
  if (form == "hbf") {
    const auto damping = value >= 0 ? shb::DampingFamily::constant(value)
                                    : shb::DampingFamily::vanishing(-value);
    traj = shb::hbf_ode_integrate(pot, damping, std::span(&x0, 1),
                                  std::span(&v0, 1), t0, t_end, dt);
  } else if (form == "memory") {
    const auto mem = r > 0 ? shb::ContinuousMemory::exponential(r)
                           : shb::ContinuousMemory::polynomial(-r);
    traj = shb::memory_ode_integrate(pot, mem, std::span(&x0, 1),
                                     std::span(&v0, 1), t0, t_end, dt);
  } else {
    throw shb::ConfigError("ode form must be hbf or memory");
  }
  shb::CsvWriter csv({"t", "x", "v"});
  for (size_t k = 0; k < traj.size(); ++k)
    csv.add_row({traj.t[k], traj.x[k][0], traj.v[k][0]});
  csv.write_file(out_path);
  std::cout << csv.str();
  return kExitOk;
}

// one row per spectral block: the quadratic case reduces to d independent
// 2x2 systems, one per eigenvalue of S
int cmd_analyze(const std::string& matrix, double lambda, double r,
                double gamma, double beta, double sigma0) {
  std::vector<double> lambdas;
  if (!matrix.empty()) {
    // rows separated by ';', entries by ','
    std::vector<std::vector<double>> rows;
    std::istringstream rs(matrix);
    std::string row;
    while (std::getline(rs, row, ';')) {
      rows.emplace_back();
      std::istringstream es(row);
      std::string e;
      while (std::getline(es, e, ',')) rows.back().push_back(std::stod(e));
    }
    const int d = static_cast<int>(rows.size());
    shb::Matrix S(d);
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(rows[i].size()) != d)
        throw shb::ConfigError("--matrix must be square (rows ';', entries ',')");
      for (int j = 0; j < d; ++j) S(i, j) = rows[i][j];
    }
    lambdas = shb::spectral_reduce(S).eigenvalues;
  } else {
    lambdas.push_back(lambda);
  }

  shb::CsvWriter csv({"lambda", "r", "gamma", "beta", "sigma0", "alpha_r",
                      "eig_re_1", "eig_im_1", "eig_re_2", "eig_im_2", "var_x",
                      "var_y", "cov_xy"});
  for (double lam : lambdas) {
    const double ar = shb::alpha_r(r, lam);
    const auto [e1, e2] = shb::block_eigen(lam, r);
    double vx, vy, cxy;
    if (beta < 1.0) {
      vx = 0.5 * sigma0 * sigma0 / lam;
      vy = 0.5 * sigma0 * sigma0 * r;
      cxy = 0.0;
    } else {
      const auto cov = shb::limit_cov_beta1_1d(lam, r, gamma, sigma0);
      vx = cov.var_x;
      vy = cov.var_y;
      cxy = cov.cov_xy;
    }
    csv.add_row({lam, r, gamma, beta, sigma0, ar, e1.real(), e1.imag(),
                 e2.real(), e2.imag(), vx, vy, cxy});
  }
  std::cout << csv.str();
  return kExitOk;
}

int cmd_schedules(double gamma, double beta, const std::string& mem_kind,
                  double r, std::int64_t N, const std::string& out_path) {
  shb::StepSchedule sched(gamma, beta);
  const auto mem = mem_kind == "polynomial" ? shb::MemorySchedule::polynomial(r)
                                            : shb::MemorySchedule::exponential(r);
  shb::CsvWriter csv({"n", "gamma_n", "Gamma_n", "Gamma2_n", "r_n", "cr_estimate"});
  for (std::int64_t n = 1; n <= N; n = std::max(n + 1, n + n / 8)) {
    csv.add_row({static_cast<double>(n), sched.gamma(n), sched.Gamma(n),
                 sched.Gamma2(n), shb::memory_r(mem, sched, n),
                 shb::cr_estimate(mem, sched, n)});
  }
  csv.write_file(out_path);
  std::cout << csv.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic heavy ball experiment harness"};
  app.require_subcommand(1);

  std::string config_path, out_path = "out.csv";

  auto* run = app.add_subcommand("run", "Monte-Carlo error curves");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--out", out_path, "output CSV path");

  auto* rates = app.add_subcommand("rates", "error curves plus log-log rate fit");
  rates->add_option("--config", config_path, "JSON config file")->required();
  rates->add_option("--out", out_path, "output CSV path");

  auto* clt = app.add_subcommand("clt", "rescaled-iterate covariance");
  clt->add_option("--config", config_path, "JSON config file")->required();
  clt->add_option("--out", out_path, "output CSV path");

  auto* trap = app.add_subcommand("trap", "multi-well success-rate study");
  trap->add_option("--config", config_path, "JSON config file")->required();
  trap->add_option("--out", out_path, "output CSV path");

  auto* ode = app.add_subcommand("ode", "reference ODE trajectory (quadratic f)");
  std::string form = "hbf";
  double ode_lambda = 1.0, damping = 1.0, ode_r = 1.0, x0 = 1.0, v0 = 0.0,
         t0 = 0.0, t_end = 10.0, dt = 1e-3;
  ode->add_option("--form", form, "hbf | memory");
  ode->add_option("--lambda", ode_lambda, "curvature of f(x) = lambda x^2 / 2");
  ode->add_option("--damping", damping,
                  "constant damping (negative value = vanishing r/t)");
  ode->add_option("--r", ode_r, "memory coefficient (negative = polynomial r/t)");
  ode->add_option("--x0", x0, "initial position");
  ode->add_option("--v0", v0, "initial velocity / memory variable");
  ode->add_option("--t0", t0, "start time");
  ode->add_option("--tend", t_end, "end time");
  ode->add_option("--dt", dt, "step size");
  ode->add_option("--out", out_path, "output CSV path");

  auto* analyze = app.add_subcommand("analyze", "closed-form quadratic analysis");
  double lambda = 1.0, r = 1.0, gamma = 1.0, beta = 1.0, sigma0 = 1.0;
  std::string matrix;
  analyze->add_option("--lambda", lambda, "Hessian eigenvalue");
  analyze->add_option("--matrix", matrix,
                      "full S instead of --lambda, e.g. \"2,1;1,2\"");
  analyze->add_option("--r", r, "memory coefficient")->required();
  analyze->add_option("--gamma", gamma, "step scale");
  analyze->add_option("--beta", beta, "step exponent");
  analyze->add_option("--sigma0", sigma0, "noise level");

  auto* schedules = app.add_subcommand("schedules", "dump schedule diagnostics");
  double sg = 1.0, sb = 1.0, sr = 1.0;
  std::string smem = "exponential";
  std::int64_t sN = 1000000;
  schedules->add_option("--gamma", sg, "step scale");
  schedules->add_option("--beta", sb, "step exponent");
  schedules->add_option("--memory", smem, "exponential | polynomial");
  schedules->add_option("--r", sr, "memory coefficient");
  schedules->add_option("--N", sN, "largest index");
  schedules->add_option("--out", out_path, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_path, false);
    if (rates->parsed()) return cmd_run(config_path, out_path, true);
    if (clt->parsed()) return cmd_clt(config_path, out_path);
    if (trap->parsed()) return cmd_trap(config_path, out_path);
    if (ode->parsed())
      return cmd_ode(form, ode_lambda, damping, ode_r, x0, v0, t0, t_end, dt,
                     out_path);
    if (analyze->parsed())
      return cmd_analyze(matrix, lambda, r, gamma, beta, sigma0);
    if (schedules->parsed()) return cmd_schedules(sg, sb, smem, sr, sN, out_path);
  } catch (const shb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const shb::DivergenceBudgetError& e) {
    std::cerr << "divergence failure: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const shb::DivergedError& e) {
    std::cerr << "divergence failure: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
