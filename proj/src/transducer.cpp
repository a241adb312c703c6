#include "catrep/transducer.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "catrep/qcore.hpp"
#include "ode.hpp"

namespace catrep {

void TransducerParams::validate() const {
  if (!(g_ens > 0.0)) throw std::invalid_argument("g_ens must be positive");
  if (delta_ns < 0.0 || gamma1 < 0.0 || gamma2 < 0.0 || kappa_mw < 0.0)
    throw std::invalid_argument("linewidths and rates must be non-negative");
  if (n_bins < 51 || n_bins % 2 == 0) throw std::invalid_argument("n_bins must be odd and at least 51");
  for (double e : {echo_efficiency, coupling_efficiency})
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("efficiencies must lie in [0, 1]");
}

namespace {

struct Bins {
  std::vector<double> detuning, weight;
};

double inverse_normal_cdf(double u) {
  // Newton on the complementary error function; u in (0, 1).
  double x = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double f = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    const double step = f / pdf;
    x -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return x;
}

Bins make_bins(const TransducerParams& p, int n) {
  Bins b;
  if (p.delta_ns == 0.0) {
    b.detuning = {0.0};
    b.weight = {1.0};
    return b;
  }
  const double fwhm = p.delta_ns;
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  b.detuning.resize(n);
  b.weight.assign(n, 1.0 / n);
  if (p.grid == BinGrid::quantile) {
    for (int j = 0; j < n; ++j) {
      const double u = (j + 0.5) / n;
      b.detuning[j] = p.lineshape == Lineshape::lorentzian
                          ? 0.5 * fwhm * std::tan(std::numbers::pi * (u - 0.5))
                          : sigma * inverse_normal_cdf(u);
    }
    return b;
  }
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d = -10.0 * fwhm + 20.0 * fwhm * j / (n - 1);
    const double h = 0.5 * fwhm;
    b.detuning[j] = d;
    b.weight[j] = p.lineshape == Lineshape::lorentzian ? h * h / (d * d + h * h)
                                                       : std::exp(-d * d / (2 * sigma * sigma));
    total += b.weight[j];
  }
  for (auto& w : b.weight) w /= total;
  return b;
}

// Density matrix on {cavity, bins}; decay leaves this block, so the ground
// state population is 1 - trace. The effective Hamiltonian is an arrowhead
// matrix: complex diagonal plus the cavity row and column.
class TransferRhs {
 public:
  TransferRhs(const TransducerParams& p, const Bins& b) : gamma2_(p.gamma2) {
    const auto n = static_cast<Eigen::Index>(b.detuning.size());
    diag_.resize(n + 1);
    coupling_.resize(n);
    diag_(0) = cplx(0.0, -0.5 * p.kappa_mw);
    for (Eigen::Index j = 0; j < n; ++j) {
      diag_(j + 1) = cplx(b.detuning[j], -0.5 * (p.gamma1 + p.gamma2));
      coupling_(j) = p.g_ens * std::sqrt(b.weight[j]);
    }
  }

  void operator()(double, const Matrix& y, Matrix& dy) const {
    const Eigen::Index d = y.rows(), n = d - 1;
    Matrix x = diag_.asDiagonal() * y;
    x.row(0) += coupling_.transpose() * y.bottomRows(n);
    x.bottomRows(n) += coupling_ * y.row(0);
    dy = cplx(0.0, -1.0) * (x - x.adjoint());
    // Dephasing jumps refill the diagonal they drained.
    for (Eigen::Index j = 1; j < d; ++j) dy(j, j) += gamma2_ * y(j, j).real();
  }

 private:
  double gamma2_;
  Vector diag_;
  Eigen::VectorXd coupling_;
};

TransferResult run(const TransducerParams& p, int n_bins) {
  const Bins b = make_bins(p, n_bins);
  const auto d = static_cast<Eigen::Index>(b.detuning.size()) + 1;
  const TransferRhs rhs(p, b);
  Matrix rho = Matrix::Zero(d, d);
  rho(0, 0) = 1.0;
  TransferResult r;
  r.transfer_time = std::numbers::pi / (2.0 * p.g_ens);
  detail::DormandPrince stepper(rhs, 1e-10, 1e-13, 1e-14 * r.transfer_time);
  double t = 0.0;
  stepper.advance(t, r.transfer_time, rho);
  r.cavity_population = rho(0, 0).real();
  for (Eigen::Index j = 1; j < d; ++j) r.eta += rho(j, j).real();
  r.lost_population = 1.0 - r.eta - r.cavity_population;
  return r;
}

}  // namespace

TransferResult spin_transfer(const TransducerParams& p, bool check_convergence) {
  p.validate();
  TransferResult r = run(p, p.n_bins);
  r.refined_eta = r.eta;
  if (check_convergence && p.delta_ns > 0.0) {
    r.refined_eta = run(p, 2 * p.n_bins - 1).eta;
    if (std::abs(r.refined_eta - r.eta) > 1e-3)
      throw DiscretizationError("spin transfer not converged in n_bins (refinement moved eta by more than 0.1 pp)");
  }
  return r;
}

double spin_transfer_efficiency(const TransducerParams& p) { return spin_transfer(p).eta; }

double transduction_budget(const TransducerParams& p) {
  return spin_transfer_efficiency(p) * p.echo_efficiency * p.coupling_efficiency;
}

}  // namespace catrep
