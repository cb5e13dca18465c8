#include "cph/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "cph/error.hpp"

namespace cph {

using Eigen::VectorXd;

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

// PI controller constants.
constexpr double kSafety = 0.9, kBeta = 0.04, kFacMin = 0.2, kFacMax = 10.0;

double error_norm(const VectorXd& err, const VectorXd& y0, const VectorXd& y1, const OdeOptions& o) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    sum += (err(i) / sc) * (err(i) / sc);
  }
  return std::sqrt(sum / static_cast<double>(err.size()));
}

void checked(const OdeRhs& rhs, double t, const VectorXd& y, VectorXd& dy, long& evals) {
  rhs(t, y, dy);
  ++evals;
  if (!dy.allFinite()) throw IntegrationError("non-finite right-hand side at t = " + std::to_string(t));
}

}  // namespace

std::vector<double> uniform_samples(double t0, double t1, int count) {
  std::vector<double> out;
  if (count < 2) return {t1};
  for (int k = 0; k < count; ++k) out.push_back(k + 1 == count ? t1 : t0 + (t1 - t0) * k / (count - 1));
  return out;
}

OdeSolution integrate_dopri5(const OdeRhs& rhs, double t0, double t1, const VectorXd& y0,
                             const std::vector<double>& sample_times, const OdeOptions& opts) {
  if (!(t1 > t0)) throw IntegrationError("integration interval must have t1 > t0");
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) throw IntegrationError("tolerances must be positive");
  OdeSolution sol;
  std::size_t next = 0;
  auto emit_until = [&](double t, auto&& value_at) {
    while (next < sample_times.size() && sample_times[next] <= t) {
      sol.times.push_back(sample_times[next]);
      sol.states.push_back(value_at(sample_times[next]));
      ++next;
    }
  };
  while (next < sample_times.size() && sample_times[next] < t0) ++next;
  if (opts.record_steps) {
    sol.step_times.push_back(t0);
    sol.step_states.push_back(y0);
  }
  if (y0.size() == 0) {
    // Nothing to integrate: a single step covers the interval.
    emit_until(t1, [&](double) { return VectorXd(); });
    if (opts.record_steps) {
      sol.step_times.push_back(t1);
      sol.step_states.push_back(y0);
    }
    sol.accepted = 1;
    return sol;
  }

  const Eigen::Index n = y0.size();
  VectorXd y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
  checked(rhs, t0, y, k1, sol.evaluations);
  emit_until(t0, [&](double) { return y; });

  double h = opts.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic.
    const VectorXd sc = (opts.atol + opts.rtol * y.array().abs()).matrix();
    const double dn0 = std::sqrt((y.array() / sc.array()).square().mean());
    const double dn1 = std::sqrt((k1.array() / sc.array()).square().mean());
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, t1 - t0);
    ytmp = y + h0 * k1;
    checked(rhs, t0 + h0, ytmp, k2, sol.evaluations);
    const double dn2 = std::sqrt(((k2 - k1).array() / sc.array()).square().mean()) / h0;
    const double dmax = std::max(dn1, dn2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5);
    h = std::min(100 * h0, h1);
  }

  double t = t0;
  double fac_old = 1e-4;
  bool last_rejected = false;
  long steps = 0;
  while (t < t1) {
    if (++steps > opts.max_steps) throw IntegrationError("maximum number of steps exceeded");
    if (t + h > t1) h = t1 - t;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError("step size underflow at t = " + std::to_string(t));

    ytmp = y + h * a21 * k1;
    checked(rhs, t + c2 * h, ytmp, k2, sol.evaluations);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    checked(rhs, t + c3 * h, ytmp, k3, sol.evaluations);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    checked(rhs, t + c4 * h, ytmp, k4, sol.evaluations);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    checked(rhs, t + c5 * h, ytmp, k5, sol.evaluations);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    checked(rhs, t + h, ytmp, k6, sol.evaluations);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    checked(rhs, t + h, ynew, k7, sol.evaluations);

    const VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, ynew, opts);
    const double fac11 = std::pow(std::max(en, 1e-300), 0.2 - kBeta * 0.75);

    if (en <= 1.0) {
      // Dense output coefficients for this step.
      const VectorXd r1 = y;
      const VectorXd r2 = ynew - y;
      const VectorXd r3 = h * k1 - r2;
      const VectorXd r4 = r2 - h * k7 - r3;
      const VectorXd r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      const double t_old = t, h_step = h;
      t = (t + h >= t1) ? t1 : t + h;
      emit_until(t, [&](double ts) -> VectorXd {
        if (ts == t) return ynew;
        const double th = (ts - t_old) / h_step, th1 = 1.0 - th;
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
      });
      y = ynew;
      k1 = k7;  // FSAL
      ++sol.accepted;
      if (opts.record_steps) {
        sol.step_times.push_back(t);
        sol.step_states.push_back(y);
      }
      double fac = fac11 / std::pow(fac_old, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
      double hnew = h_step / fac;
      if (last_rejected) hnew = std::min(hnew, h_step);
      fac_old = std::max(en, 1e-4);
      last_rejected = false;
      h = hnew;
    } else {
      ++sol.rejected;
      h = h / std::min(1.0 / kFacMin, fac11 / kSafety);
      last_rejected = true;
    }
  }
  emit_until(t1, [&](double) { return y; });
  return sol;
}

}  // namespace cph
