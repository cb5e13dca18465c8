#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace cph {

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt)>;

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-8;
  double initial_step = 0.0;  // 0 = automatic
  long max_steps = 10'000'000;
  bool record_steps = false;
};

struct OdeSolution {
  std::vector<double> times;  // requested sample times
  std::vector<Eigen::VectorXd> states;
  std::vector<double> step_times;  // accepted step ends (record_steps only), starting with t0
  std::vector<Eigen::VectorXd> step_states;
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

// Dormand-Prince 5(4) with PI step-size control and 4th-order dense output at
// `sample_times` (sorted, inside [t0, t1]). Throws IntegrationError on
// step-size underflow or a non-finite right-hand side.
OdeSolution integrate_dopri5(const OdeRhs& rhs, double t0, double t1, const Eigen::VectorXd& y0,
                             const std::vector<double>& sample_times, const OdeOptions& opts = {});

// `count` equally spaced times from t0 to t1 inclusive (count >= 2).
std::vector<double> uniform_samples(double t0, double t1, int count);

}  // namespace cph
