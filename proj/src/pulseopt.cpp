#include "catrep/pulseopt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace catrep {

void GrapeProblem::validate() const {
  params.validate();
  if (n_segments < 4) throw std::invalid_argument("GRAPE needs at least 4 segments");
  if (!(total_time > 0.0)) throw std::invalid_argument("GRAPE total time must be positive");
  if (!(amplitude_bound > 0.0)) throw std::invalid_argument("GRAPE amplitude bound must be positive");
  if (!initial.is_pure() || !target.is_pure()) throw std::invalid_argument("GRAPE states must be pure");
  if (initial.dims() != target.dims() || initial.dims().size() != 1)
    throw DegenerateInput("GRAPE states must share a single-mode space");
}

namespace {

struct Controls {
  Matrix drift;
  Matrix c1, c2;
};

Controls make_controls(const GrapeProblem& p) {
  const int d = p.dim();
  const auto c = two_photon_controls(d);
  return {kerr_term(d, p.params.K).matrix(), c[0].matrix(), c[1].matrix()};
}

}  // namespace

GrapeEvaluation grape_evaluate(const GrapeProblem& p, const std::vector<double>& ep,
                               const std::vector<double>& ep_perp) {
  p.validate();
  const std::size_t n = static_cast<std::size_t>(p.n_segments);
  if (ep.size() != n || ep_perp.size() != n) throw std::invalid_argument("segment count mismatch");
  const Controls c = make_controls(p);
  const double dt = p.total_time / static_cast<double>(n);
  const Eigen::Index d = p.dim();

  std::vector<Matrix> vecs(n);
  std::vector<Eigen::VectorXd> vals(n);
  std::vector<Vector> fwd(n + 1);
  fwd[0] = p.initial.vector();
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix h = c.drift + ep[k] * c.c1 + ep_perp[k] * c.c2;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    vecs[k] = es.eigenvectors();
    vals[k] = es.eigenvalues();
    Vector coeff = vecs[k].adjoint() * fwd[k];
    for (Eigen::Index m = 0; m < d; ++m) coeff(m) *= std::polar(1.0, -vals[k](m) * dt);
    fwd[k + 1] = vecs[k] * coeff;
  }
  const Vector tgt = p.target.vector();
  const cplx overlap = tgt.dot(fwd[n]);

  GrapeEvaluation out;
  out.fidelity = std::norm(overlap);
  out.grad_ep.assign(n, 0.0);
  out.grad_perp.assign(n, 0.0);

  Vector chi = tgt;  // U_{k+1}^dag ... U_N^dag |target>
  Matrix phi(d, d);
  for (std::size_t kk = n; kk-- > 0;) {
    const Matrix& v = vecs[kk];
    const Eigen::VectorXd& lam = vals[kk];
    // Divided differences of exp(-i lambda dt): the exact Frechet derivative.
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) {
        const double x = 0.5 * (lam(i) - lam(j)) * dt;
        const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        phi(i, j) = cplx(0.0, -dt) * std::polar(1.0, -0.5 * (lam(i) + lam(j)) * dt) * sinc;
      }
    const Vector a = v.adjoint() * fwd[kk];
    const Vector b = v.adjoint() * chi;
    const Matrix c1t = v.adjoint() * c.c1 * v;
    const Matrix c2t = v.adjoint() * c.c2 * v;
    const cplx d1 = b.dot(phi.cwiseProduct(c1t) * a);
    const cplx d2 = b.dot(phi.cwiseProduct(c2t) * a);
    out.grad_ep[kk] = 2.0 * (std::conj(overlap) * d1).real();
    out.grad_perp[kk] = 2.0 * (std::conj(overlap) * d2).real();
    // chi <- U_k^dag chi
    Vector coeff = b;
    for (Eigen::Index m = 0; m < d; ++m) coeff(m) *= std::polar(1.0, lam(m) * dt);
    chi = v * coeff;
  }
  return out;
}

PulseSchedule grape_initial_guess(const GrapeProblem& p, bool time_reversed) {
  p.validate();
  PulseSchedule s = adiabatic_drive_pulse(p.params, p.total_time / 1.3).resampled(p.n_segments);
  std::vector<double> a = s.segments_ep(), b = s.segments_ep_perp();
  for (auto& v : a) v = std::clamp(v, -p.amplitude_bound, p.amplitude_bound);
  s = PulseSchedule::piecewise(p.total_time, std::move(a), std::move(b));
  return time_reversed ? s.reversed() : s;
}

namespace {

// Scaled variables x = u / bound in [-1, 1]; layout [ep..., perp...].
class Objective {
 public:
  explicit Objective(const GrapeProblem& p) : p_(p), n_(p.n_segments) {}

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    std::vector<double> a(n_), b(n_);
    for (int k = 0; k < n_; ++k) {
      a[k] = x(k) * p_.amplitude_bound;
      b[k] = x(n_ + k) * p_.amplitude_bound;
    }
    const GrapeEvaluation e = grape_evaluate(p_, a, b);
    if (grad) {
      grad->resize(2 * n_);
      for (int k = 0; k < n_; ++k) {
        (*grad)(k) = e.grad_ep[k] * p_.amplitude_bound;
        (*grad)(n_ + k) = e.grad_perp[k] * p_.amplitude_bound;
      }
    }
    return e.fidelity;
  }

  PulseSchedule to_pulse(const Eigen::VectorXd& x) const {
    std::vector<double> a(n_), b(n_);
    for (int k = 0; k < n_; ++k) {
      a[k] = x(k) * p_.amplitude_bound;
      b[k] = x(n_ + k) * p_.amplitude_bound;
    }
    return PulseSchedule::piecewise(p_.total_time, std::move(a), std::move(b));
  }

 private:
  const GrapeProblem& p_;
  int n_;
};

Eigen::VectorXd clip(Eigen::VectorXd x) { return x.cwiseMax(-1.0).cwiseMin(1.0); }

GrapeResult run_lbfgs(const Objective& f, Eigen::VectorXd x, const GrapeOptions& opt) {
  GrapeResult r;
  x = clip(std::move(x));
  Eigen::VectorXd g;
  double fx = f(x, &g);
  r.initial_fidelity = fx;
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> mem;  // (s, y) for minimizing -F

  auto direction = [&](const Eigen::VectorXd& grad) {
    // Two-loop recursion on the ascent gradient.
    Eigen::VectorXd q = grad;
    std::vector<double> alphas(mem.size());
    for (std::size_t i = mem.size(); i-- > 0;) {
      const auto& [s, y] = mem[i];
      alphas[i] = s.dot(q) / y.dot(s);
      q -= alphas[i] * y;
    }
    if (!mem.empty()) {
      const auto& [s, y] = mem.back();
      q *= s.dot(y) / y.dot(y);
    } else {
      const double gmax = grad.cwiseAbs().maxCoeff();
      if (gmax > 0.0) q *= 0.1 / gmax;
    }
    for (std::size_t i = 0; i < mem.size(); ++i) {
      const auto& [s, y] = mem[i];
      const double beta = y.dot(q) / y.dot(s);
      q += (alphas[i] - beta) * s;
    }
    // Freeze components pinned at a bound and pushing outward.
    for (Eigen::Index i = 0; i < q.size(); ++i)
      if ((x(i) >= 1.0 && q(i) > 0.0) || (x(i) <= -1.0 && q(i) < 0.0)) q(i) = 0.0;
    return q;
  };

  for (int it = 0; it < opt.max_iters; ++it) {
    if (fx > 1.0 - 1e-12) {
      r.converged = true;
      break;
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) {
        if (mem.empty()) break;
        mem.clear();
      }
      const Eigen::VectorXd d = direction(g);
      double step = 1.0;
      for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
        const Eigen::VectorXd xn = clip(x + step * d);
        const Eigen::VectorXd dx = xn - x;
        if (dx.squaredNorm() == 0.0) break;
        Eigen::VectorXd gn;
        const double fn = f(xn, &gn);
        if (fn >= fx + 1e-4 * g.dot(dx) && fn > fx) {
          const Eigen::VectorXd y = -(gn - g);
          if (dx.dot(y) > 1e-14 * dx.norm() * y.norm()) {
            mem.emplace_back(dx, y);
            if (static_cast<int>(mem.size()) > opt.lbfgs_memory) mem.pop_front();
          }
          x = xn;
          g = gn;
          fx = fn;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      r.converged = true;  // no ascent direction left
      break;
    }
    r.trace.push_back(fx);
    r.iterations = it + 1;
    const int w = opt.window;
    if (static_cast<int>(r.trace.size()) > w &&
        r.trace.back() - r.trace[r.trace.size() - 1 - w] < opt.convergence_tol) {
      r.converged = true;
      break;
    }
  }
  r.fidelity = fx;
  r.pulse = f.to_pulse(x);
  return r;
}

}  // namespace

GrapeResult grape_optimize(const GrapeProblem& p, const PulseSchedule& initial_guess, const GrapeOptions& opt) {
  p.validate();
  if (!initial_guess.is_piecewise() || initial_guess.n_segments() != p.n_segments)
    throw std::invalid_argument("initial guess must be piecewise on the problem grid");
  if (opt.max_iters < 0 || opt.window < 1 || opt.lbfgs_memory < 1 || opt.restarts < 0)
    throw std::invalid_argument("invalid GRAPE options");
  const int n = p.n_segments;
  Eigen::VectorXd x0(2 * n);
  for (int k = 0; k < n; ++k) {
    x0(k) = initial_guess.segments_ep()[k] / p.amplitude_bound;
    x0(n + k) = initial_guess.segments_ep_perp()[k] / p.amplitude_bound;
  }
  const Objective f(p);
  GrapeResult best = run_lbfgs(f, x0, opt);
  for (int r = 1; r <= opt.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> noise(-opt.restart_noise, opt.restart_noise);
    Eigen::VectorXd x = x0;
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += noise(rng);
    GrapeResult trial = run_lbfgs(f, x, opt);
    if (trial.fidelity > best.fidelity) best = std::move(trial);
  }
  return best;
}

double evaluate_pulse(const GrapeProblem& p, const PulseSchedule& pulse, double kappa) {
  p.validate();
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be non-negative");
  const int d = p.dim();
  const TimeDependentHamiltonian h = drive_hamiltonian(p.params, pulse, d);
  const std::vector<CollapseOp> loss{{annihilation(d), kappa}};
  EvolveOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;
  const Trajectory tr = evolve(h, loss, p.initial, opt);
  return state_fidelity(tr.final_state(), p.target);
}

}  // namespace catrep
