#include "catrep/dynamics.hpp"

#include "ode.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

namespace catrep {

using detail::DormandPrince;

using SparseMatrix = Eigen::SparseMatrix<cplx>;

namespace {

SparseMatrix to_sparse(const Matrix& m) { return m.sparseView(1.0, 0.0); }

// Right-hand side of the master equation, or of the Schrodinger equation
// for state vectors. Uses H_eff = H - (i/2) sum L^dag L so that
// d rho/dt = -i (H_eff rho - rho H_eff^dag) + sum L rho L^dag.
class Rhs {
 public:
  Rhs(const TimeDependentHamiltonian& h, std::span<const CollapseOp> collapse, bool density)
      : density_(density) {
    Matrix heff = h.static_part.matrix();
    for (const auto& c : collapse) {
      if (c.rate < 0.0) throw std::invalid_argument("collapse rate must be non-negative");
      if (c.op.dims() != h.static_part.dims())
        throw DegenerateInput("collapse operator dims differ from Hamiltonian dims");
      if (c.rate == 0.0) continue;
      const Matrix& l = c.op.matrix();
      const SparseMatrix ls = to_sparse(l);
      heff -= cplx(0.0, 0.5 * c.rate) * Matrix(SparseMatrix(ls.adjoint()) * ls);
      Jump jump;
      const double s = std::sqrt(c.rate);
      for (Eigen::Index col = 0; col < l.cols(); ++col)
        for (Eigen::Index row = 0; row < l.rows(); ++row)
          if (l(row, col) != cplx(0.0)) jump.push_back({row, col, s * l(row, col)});
      jumps_.push_back(std::move(jump));
    }
    static_ = to_sparse(heff);
    for (const auto& d : h.drives) {
      if (d.op.dims() != h.static_part.dims())
        throw DegenerateInput("drive operator dims differ from Hamiltonian dims");
      drive_ops_.push_back(to_sparse(d.op.matrix()));
      coeffs_.push_back(d.coeff);
    }
  }

  void operator()(double t, const Matrix& y, Matrix& dy) const {
    dy.noalias() = static_ * y;
    for (std::size_t k = 0; k < drive_ops_.size(); ++k) {
      const cplx c = coeffs_[k](t);
      if (c != cplx(0.0)) dy.noalias() += c * (drive_ops_[k] * y);
    }
    if (!density_) {
      dy *= cplx(0.0, -1.0);
      return;
    }
    // rho is Hermitian, so rho H_eff^dag = (H_eff rho)^dag.
    const Matrix x = dy;
    dy = cplx(0.0, -1.0) * (x - x.adjoint());
    // L rho L^dag from the nonzero entries of L.
    for (const auto& j : jumps_)
      for (const auto& e1 : j)
        for (const auto& e2 : j) dy(e1.row, e2.row) += e1.value * std::conj(e2.value) * y(e1.col, e2.col);
  }

 private:
  bool density_;
  SparseMatrix static_;
  std::vector<SparseMatrix> drive_ops_;
  std::vector<std::function<cplx(double)>> coeffs_;
  struct Entry {
    Eigen::Index row, col;
    cplx value;
  };
  using Jump = std::vector<Entry>;
  std::vector<Jump> jumps_;
};

}  // namespace

Matrix TimeDependentHamiltonian::at(double t) const {
  Matrix h = static_part.matrix();
  for (const auto& d : drives) h += d.coeff(t) * d.op.matrix();
  return h;
}

Trajectory evolve(const TimeDependentHamiltonian& h, std::span<const CollapseOp> collapse,
                  const QState& rho0, const EvolveOptions& options) {
  if (rho0.dims() != h.static_part.dims())
    throw DegenerateInput("initial state dims differ from Hamiltonian dims");
  if (options.n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
  if (!(h.t1 > h.t0)) throw std::invalid_argument("empty time span");

  bool dissipative = false;
  for (const auto& c : collapse) dissipative = dissipative || c.rate > 0.0;
  const bool density = dissipative || !rho0.is_pure();
  const StateKind kind = density ? StateKind::mixed : StateKind::pure;

  Rhs rhs(h, collapse, density);
  const double span = h.t1 - h.t0;
  DormandPrince stepper(rhs, options.rel_tol, options.abs_tol, options.min_step * span);

  std::vector<double> samples(options.n_samples);
  for (int i = 0; i < options.n_samples; ++i)
    samples[i] = h.t0 + span * static_cast<double>(i) / (options.n_samples - 1);
  samples.back() = h.t1;

  std::vector<double> stops(samples.begin() + 1, samples.end());
  for (double b : h.breakpoints)
    if (b > h.t0 && b < h.t1) stops.push_back(b);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end(),
                          [&](double a, double b) { return std::abs(a - b) <= 1e-15 * span; }),
              stops.end());

  Trajectory traj;
  for (const auto& o : options.observables) {
    traj.observable_names.push_back(o.name);
    traj.expectations.emplace_back();
  }
  auto record = [&](double t, const Matrix& y) {
    Matrix data = y;
    if (density) data = 0.5 * (data + data.adjoint()).eval();
    QState s = QState::unchecked(rho0.dims(), std::move(data), kind);
    for (std::size_t k = 0; k < options.observables.size(); ++k)
      traj.expectations[k].push_back(expectation(options.observables[k].op, s).real());
    traj.times.push_back(t);
    traj.states.push_back(std::move(s));
  };

  Matrix y = density ? rho0.density() : rho0.data();
  double t = h.t0;
  record(t, y);
  std::size_t next_sample = 1;
  for (double stop : stops) {
    stepper.advance(t, stop, y);
    t = stop;
    while (next_sample < samples.size() && std::abs(samples[next_sample] - t) <= 1e-15 * span) {
      record(samples[next_sample], y);
      ++next_sample;
    }
  }
  return traj;
}

namespace {

// Structured products on two-mode data of dims (d, d). Each column of y is a
// vector with mode 1 as the fast index, so it reshapes to M(j, i).
Matrix left_mode0(const Matrix& a, const Matrix& y, int d) {
  Matrix out(y.rows(), y.cols());
  const Matrix at = a.transpose();
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    Eigen::Map<const Matrix> m(y.col(c).data(), d, d);
    Eigen::Map<Matrix>(out.col(c).data(), d, d).noalias() = m * at;
  }
  return out;
}

Matrix left_mode1(const Matrix& b, const Matrix& y, int d) {
  Matrix out(y.rows(), y.cols());
  Eigen::Map<const Matrix> m(y.data(), d, y.size() / d);
  Eigen::Map<Matrix>(out.data(), d, y.size() / d).noalias() = b * m;
  return out;
}

class CoupledRhs {
 public:
  CoupledRhs(const CoupledModes& p, const std::array<Eigen::VectorXd, 2>& energies,
             const std::array<Matrix, 2>& basis, bool density)
      : d_(static_cast<int>(energies[0].size())), density_(density), energies_(energies) {
    auto local = [&](const Matrix& x, int mode) -> Matrix {
      return basis[mode].adjoint() * x * basis[mode];
    };
    for (const auto& c : p.couplings)
      couplings_.push_back({c.g, local(c.a.matrix(), 0), local(c.b.matrix(), 1)});
    for (int mode = 0; mode < 2; ++mode) {
      loss_[mode] = Matrix::Zero(d_, d_);
      for (const auto& c : p.local_collapse[mode]) {
        if (c.rate == 0.0) continue;
        const Matrix& l = c.op.matrix();
        loss_[mode] += c.rate * local(l.adjoint() * l, mode);
        jumps_.push_back({mode, std::sqrt(c.rate) * local(l, mode)});
      }
    }
  }

  void operator()(double tau, const Matrix& y, Matrix& dy) const {
    dy = cplx(0.0, -0.5) * (left_mode0(phased(loss_[0], 0, tau), y, d_) +
                            left_mode1(phased(loss_[1], 1, tau), y, d_));
    for (const auto& c : couplings_)
      dy += c.g * left_mode0(phased(c.a, 0, tau), left_mode1(phased(c.b, 1, tau), y, d_), d_);
    if (!density_) {
      dy *= cplx(0.0, -1.0);
      return;
    }
    const Matrix x = dy;
    dy = cplx(0.0, -1.0) * (x - x.adjoint());
    for (const auto& j : jumps_) {
      const Matrix jt = phased(j.op, j.mode, tau);
      const Matrix jr = apply(jt, j.mode, y);
      dy += apply(jt, j.mode, jr.adjoint());
    }
  }

  Matrix apply(const Matrix& op, int mode, const Matrix& y) const {
    return mode == 0 ? left_mode0(op, y, d_) : left_mode1(op, y, d_);
  }

  // Local-frame operator in the interaction picture at time tau.
  Matrix phased(const Matrix& x, int mode, double tau) const {
    Matrix out(d_, d_);
    const Eigen::VectorXd& e = energies_[mode];
    for (int k = 0; k < d_; ++k)
      for (int i = 0; i < d_; ++i) out(i, k) = x(i, k) * std::polar(1.0, (e(i) - e(k)) * tau);
    return out;
  }

 private:
  struct LocalCoupling {
    cplx g;
    Matrix a, b;
  };
  struct Jump {
    int mode;
    Matrix op;
  };
  int d_;
  bool density_;
  std::array<Eigen::VectorXd, 2> energies_;
  std::vector<LocalCoupling> couplings_;
  std::array<Matrix, 2> loss_;
  std::vector<Jump> jumps_;
};

}  // namespace

QState evolve_coupled(const CoupledModes& p, const QState& rho0, double duration,
                      const EvolveOptions& options) {
  const int d = p.local_h[0].size();
  if (p.local_h[1].size() != d || p.local_h[0].dims().size() != 1 || p.local_h[1].dims().size() != 1)
    throw DegenerateInput("coupled modes need two single-mode Hamiltonians of equal dimension");
  if (rho0.dims() != Dims{d, d}) throw DegenerateInput("initial state dims must be (d, d)");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");

  Matrix coupling = Matrix::Zero(d * d, d * d);
  for (const auto& c : p.couplings) {
    if (c.a.size() != d || c.b.size() != d) throw DegenerateInput("coupling operator dimension mismatch");
    coupling += c.g * tensor({c.a, c.b}).matrix();
  }
  if ((coupling - coupling.adjoint()).norm() > 1e-10 * std::max(1.0, coupling.norm()))
    throw std::logic_error("coupling is not Hermitian");

  bool dissipative = false;
  for (const auto& mode : p.local_collapse)
    for (const auto& c : mode) {
      if (c.rate < 0.0) throw std::invalid_argument("collapse rate must be non-negative");
      if (c.op.size() != d) throw DegenerateInput("collapse operator dimension mismatch");
      dissipative = dissipative || c.rate > 0.0;
    }
  const bool density = dissipative || !rho0.is_pure();

  std::array<Eigen::VectorXd, 2> energies;
  std::array<Matrix, 2> basis;
  for (int mode = 0; mode < 2; ++mode) {
    p.local_h[mode].assert_hermitian(1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.local_h[mode].matrix());
    energies[mode] = es.eigenvalues();
    basis[mode] = es.eigenvectors();
  }
  CoupledRhs rhs(p, energies, basis, density);

  // M y M^dag for y Hermitian, or M y for vectors, with M = m0 (x) m1.
  auto transform = [&](const Matrix& m0, const Matrix& m1, const Matrix& y) -> Matrix {
    Matrix x = left_mode0(m0, left_mode1(m1, y, d), d);
    if (!density) return x;
    const Matrix xa = x.adjoint();
    return left_mode0(m0, left_mode1(m1, xa, d), d);
  };

  Matrix y = density ? rho0.density() : rho0.data();
  y = transform(basis[0].adjoint(), basis[1].adjoint(), y);
  DormandPrince stepper(rhs, options.rel_tol, options.abs_tol, options.min_step * duration);
  double t = 0.0;
  stepper.advance(t, duration, y);

  std::array<Matrix, 2> back;
  for (int mode = 0; mode < 2; ++mode) {
    Vector ph(d);
    for (int k = 0; k < d; ++k) ph(k) = std::polar(1.0, -energies[mode](k) * duration);
    back[mode] = basis[mode] * ph.asDiagonal();
  }
  Matrix out = transform(back[0], back[1], y);
  if (density) out = 0.5 * (out + out.adjoint()).eval();
  return QState::unchecked(rho0.dims(), std::move(out), density ? StateKind::mixed : StateKind::pure);
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "time";
  for (const auto& n : observable_names) os << ',' << n;
  os << "\r\n";
  char buf[64];
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", times[i]);
    os << buf;
    for (const auto& series : expectations) {
      std::snprintf(buf, sizeof buf, "%.12g", series[i]);
      os << ',' << buf;
    }
    os << "\r\n";
  }
}

Matrix liouvillian(const Matrix& h, std::span<const CollapseOp> collapse) {
  const Eigen::Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  Matrix l = cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& c : collapse) {
    if (c.rate < 0.0) throw std::invalid_argument("collapse rate must be non-negative");
    if (c.rate == 0.0) continue;
    const Matrix& j = c.op.matrix();
    const Matrix jdj = j.adjoint() * j;
    l += c.rate * (kron(j.conjugate(), j) - 0.5 * kron(id, jdj) - 0.5 * kron(jdj.transpose(), id));
  }
  return l;
}

ChannelPropagator::ChannelPropagator(const QOperator& h, std::span<const CollapseOp> collapse, double dt)
    : dim_(h.size()), dt_(dt) {
  for (const auto& c : collapse)
    if (c.op.dims() != h.dims()) throw DegenerateInput("collapse operator dims differ from Hamiltonian");
  superop_ = (liouvillian(h.matrix(), collapse) * cplx(dt)).exp();
}

Matrix ChannelPropagator::apply(const Matrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw DegenerateInput("channel: dimension mismatch");
  Eigen::Map<const Vector> v(rho.data(), rho.size());
  Vector out = superop_ * v;
  return Eigen::Map<const Matrix>(out.data(), dim_, dim_);
}

Matrix ChannelPropagator::apply_on_mode(const Matrix& rho, int which) const {
  const int d = dim_;
  if (rho.rows() != d * d || rho.cols() != d * d)
    throw DegenerateInput("channel: two-mode dimension mismatch");
  if (which != 0 && which != 1) throw DegenerateInput("channel: mode index must be 0 or 1");
  const int d2 = d * d;
  // rows: column-stacked vec index on the acted mode; cols: spectator pair
  Matrix gathered(d2, d2);
  auto full = [&](int acted, int spectator) {
    return which == 0 ? acted * d + spectator : spectator * d + acted;
  };
  for (int sj = 0; sj < d; ++sj)
    for (int si = 0; si < d; ++si) {
      const int col = si + d * sj;
      for (int aj = 0; aj < d; ++aj)
        for (int ai = 0; ai < d; ++ai) gathered(ai + d * aj, col) = rho(full(ai, si), full(aj, sj));
    }
  const Matrix moved = superop_ * gathered;
  Matrix out(d2, d2);
  for (int sj = 0; sj < d; ++sj)
    for (int si = 0; si < d; ++si) {
      const int col = si + d * sj;
      for (int aj = 0; aj < d; ++aj)
        for (int ai = 0; ai < d; ++ai) out(full(ai, si), full(aj, sj)) = moved(ai + d * aj, col);
    }
  return out;
}

DecayFit fit_exponential_decay(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw std::invalid_argument("fit: length mismatch");
  if (times.size() < 8) throw std::invalid_argument("fit: need at least 8 samples");
  const double n = static_cast<double>(times.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw std::invalid_argument("fit: values must be positive");
    logs[i] = std::log(values[i]);
    st += times[i];
    sy += logs[i];
    stt += times[i] * times[i];
    sty += times[i] * logs[i];
  }
  const double denom = n * stt - st * st;
  if (denom <= 0.0) throw std::invalid_argument("fit: degenerate time grid");
  const double slope = (n * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double r = logs[i] - (intercept + slope * times[i]);
    ss += r * r;
  }
  return {-slope, intercept, std::sqrt(ss / n)};
}

}  // namespace catrep
