#include "catrep/device.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "catrep/catqubit.hpp"
#include "catrep/csv.hpp"
#include "catrep/dynamics.hpp"
#include "catrep/qcore.hpp"

namespace catrep {

void DeviceParams::validate() const {
  if (kappa_c < 0.0 || gamma < 0.0) throw std::invalid_argument("decay rates must be non-negative");
  if (K_q < 0.0) throw std::invalid_argument("anharmonicity must be non-negative");
  const double d = std::abs(delta());
  if (d == 0.0 || std::abs(g) / d >= 0.3)
    throw DispersiveRegimeError("not dispersive: need g/|Delta| < 0.3");
}

namespace {

// Minimum-cost perfect assignment (Hungarian algorithm, O(n^3)).
// Returns row_of[col].
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_of(n);
  for (int j = 1; j <= n; ++j) row_of[j - 1] = p[j] - 1;
  return row_of;
}

KerrEstimate kerr_once(const DeviceParams& p, int nc, int nq) {
  if (nc < 7 || nq < 2) throw std::invalid_argument("need at least 7 cavity and 2 qubit levels");
  const Dims dims{nc, nq};
  const QOperator a = embed(annihilation(nc), dims, 0), b = embed(annihilation(nq), dims, 1);
  const QOperator bd = b.adjoint();
  const QOperator h = cplx(p.delta()) * (bd * b) - cplx(p.K_q) * (bd * bd * b * b) +
                      cplx(p.g) * (a.adjoint() * b + a * bd);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  const Eigen::MatrixXd overlap = es.eigenvectors().cwiseAbs2();  // (bare, eigen)
  const std::vector<int> bare_of_eigen = hungarian(-overlap);
  std::vector<int> eigen_of_bare(overlap.rows());
  for (int e = 0; e < static_cast<int>(bare_of_eigen.size()); ++e) eigen_of_bare[bare_of_eigen[e]] = e;

  std::vector<double> energy(6);
  for (int i = 0; i < 6; ++i) {
    const int bare = i * nq;  // |i, 0>
    const int e = eigen_of_bare[bare];
    if (overlap(bare, e) < 0.8)
      throw DispersiveRegimeError("dressed-state labelling ambiguous (overlap below 0.8)");
    energy[i] = es.eigenvalues()(e);
  }
  // spacing_i = offset + slope * i, slope = -2K
  double si = 0, ss = 0, sii = 0, sis = 0;
  std::vector<double> spacing(5);
  for (int i = 0; i < 5; ++i) {
    spacing[i] = energy[i + 1] - energy[i];
    si += i;
    ss += spacing[i];
    sii += i * i;
    sis += i * spacing[i];
  }
  const double slope = (5 * sis - si * ss) / (5 * sii - si * si);
  const double offset = (ss - slope * si) / 5;
  double r2 = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double r = spacing[i] - (offset + slope * i);
    r2 += r * r;
  }
  KerrEstimate k;
  k.K = -slope / 2;
  k.offset = offset;
  k.residual = std::sqrt(r2 / 5);
  return k;
}

}  // namespace

KerrEstimate dispersive_kerr(const DeviceParams& p, const KerrOptions& opt) {
  p.validate();
  KerrEstimate k = kerr_once(p, opt.cavity_levels, opt.qubit_levels);
  if (opt.convergence_check) {
    const KerrEstimate k2 = kerr_once(p, opt.cavity_levels + 2, opt.qubit_levels + 2);
    const double scale = std::max(std::abs(k2.K), std::abs(k.K));
    k.convergence_change = scale == 0.0 ? 0.0 : std::abs(k2.K - k.K) / scale;
  }
  return k;
}

double purcell_kappa(double kappa_c, double gamma, double g, double delta) {
  if (delta == 0.0) throw std::invalid_argument("detuning must be non-zero");
  const double r = (g / delta) * (g / delta);
  return (1.0 - r) * kappa_c + r * gamma;
}

KappaEffResult kappa_eff(double K, double kappa, double alpha, int dim) {
  if (!(K > 0.0) || !(kappa >= 0.0) || !(alpha > 0.0)) throw std::invalid_argument("invalid kappa_eff inputs");
  if (kappa == 0.0) return {};
  // Dimensionless: time in units of 1/kappa.
  CatQubitParams p{K / kappa, 1.0, alpha, dim};
  const QOperator h = static_cat_hamiltonian(p, dim);
  const std::vector<CollapseOp> loss{{annihilation(dim), 1.0}};
  const double span = 1.0 / (2.0 * alpha * alpha);  // about one e-fold
  constexpr int n = 16;
  const ChannelPropagator step(h, loss, span / (n - 1));
  const Vector cp = cat_state(alpha, Parity::even, dim).vector();
  const Vector cm = cat_state(alpha, Parity::odd, dim).vector();
  const Vector psi = (cp + cplx(0, 1) * cm) / std::sqrt(2.0);
  Matrix rho = psi * psi.adjoint();
  std::vector<double> times, values;
  for (int k = 0; k < n; ++k) {
    if (k > 0) rho = step.apply(rho);
    times.push_back(k * span / (n - 1));
    values.push_back(std::abs(cp.dot(rho * cm)));
  }
  const DecayFit fit = fit_exponential_decay(times, values);
  KappaEffResult r;
  r.kappa_eff = fit.rate * kappa;
  r.residual = fit.residual;
  r.flagged = r.residual > 0.05;
  return r;
}

std::vector<DeviceRow> device_table(const std::vector<DeviceParams>& rows, double alpha) {
  std::vector<DeviceRow> out;
  for (const auto& p : rows) {
    DeviceRow r;
    r.kappa_c = p.kappa_c;
    r.gamma = p.gamma;
    r.g = p.g;
    r.delta = p.delta();
    r.K_q = p.K_q;
    r.K = dispersive_kerr(p).K;
    r.kappa = purcell_kappa(p.kappa_c, p.gamma, p.g, p.delta());
    r.kappa_eff = r.K > 0.0 ? kappa_eff(r.K, r.kappa, alpha).kappa_eff : 0.0;
    out.push_back(r);
  }
  return out;
}

void write_device_csv(std::ostream& os, const std::vector<DeviceRow>& rows) {
  CsvWriter w(os);
  w.header({"kappa_c", "gamma", "g", "Delta", "K_q", "K", "kappa", "kappa_eff"});
  for (const auto& r : rows)
    w.field(r.kappa_c).field(r.gamma).field(r.g).field(r.delta).field(r.K_q).field(r.K).field(r.kappa).field(r.kappa_eff).end_row();
}

}  // namespace catrep
