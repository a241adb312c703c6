#pragma once

// Adaptive Dormand-Prince 5(4) stepper on dense complex matrices. Internal.

#include <algorithm>
#include <cmath>

#include "catrep/dynamics.hpp"

namespace catrep::detail {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

inline double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double rtol, double atol) {
  double acc = 0.0;
  const Eigen::Index n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
    const double r = std::abs(err.data()[i]) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

template <class F>
class DormandPrince {
 public:
  DormandPrince(const F& f, double rtol, double atol, double min_step)
      : f_(f), rtol_(rtol), atol_(atol), min_step_(min_step) {}

  // Advances y from t to t_end, exactly landing on t_end.
  void advance(double& t, double t_end, Matrix& y) {
    if (t_end <= t) return;
    if (h_ <= 0.0) h_ = initial_step(t, t_end, y);
    f_(t, y, k1_);
    while (t < t_end) {
      double h = std::min(h_, t_end - t);
      const bool last = (t + h >= t_end);
      if (h < min_step_) throw IntegrationError("step size underflow", t);

      stage(t + c2 * h, y + h * (a21 * k1_), k2_);
      stage(t + c3 * h, y + h * (a31 * k1_ + a32 * k2_), k3_);
      stage(t + c4 * h, y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_), k4_);
      stage(t + c5 * h, y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_), k5_);
      stage(t + h, y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_), k6_);
      ynew_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      const double tn = last ? t_end : t + h;
      f_(tn, ynew_, k7_);
      err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
      const double en = error_norm(err_, y, ynew_, rtol_, atol_);
      if (!std::isfinite(en)) throw IntegrationError("non-finite state", t);

      if (en <= 1.0) {
        t = tn;
        y.swap(ynew_);
        k1_.swap(k7_);
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        // A step truncated by t_end should not shrink the carried step.
        if (!last || h == h_) h_ = h * fac;
      } else {
        h_ = h * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 1.0);
        if (h_ < min_step_) throw IntegrationError("step size underflow", t);
      }
    }
  }

 private:
  void stage(double t, const Matrix& y, Matrix& k) const { f_(t, y, k); }

  double initial_step(double t, double t_end, const Matrix& y) const {
    Matrix f0;
    f_(t, y, f0);
    const double d0 = y.norm(), d1 = f0.norm();
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * (t_end - t) : 0.01 * d0 / d1;
    return std::min(h, t_end - t);
  }

  const F& f_;
  double rtol_, atol_, min_step_;
  double h_ = 0.0;
  Matrix k1_, k2_, k3_, k4_, k5_, k6_, k7_, ynew_, err_;
};

}  // namespace catrep::detail
