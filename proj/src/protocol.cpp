// Heralded entanglement of two stationary qubits by single-photon
// interference. Space: a (2) , c (2), photon b (3), photon d (3).

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "catrep/catqubit.hpp"

namespace catrep {

namespace {

const Dims kDims{2, 2, 3, 3};
constexpr int kA = 0, kC = 1, kB = 2, kD = 3;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Kraus operators of a loss channel with transmittance eta on one mode.
std::vector<Matrix> loss_kraus(double eta, int dim) {
  std::vector<Matrix> out;
  for (int l = 0; l < dim; ++l) {
    Matrix k = Matrix::Zero(dim, dim);
    for (int n = l; n < dim; ++n)
      k(n - l, n) = std::sqrt(binomial(n, l) * std::pow(eta, n - l) * std::pow(1.0 - eta, l));
    out.push_back(k);
  }
  return out;
}

Matrix apply_loss(const Matrix& rho, double eta, int which) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : loss_kraus(eta, kDims[which])) {
    const Matrix full = embed(QOperator({kDims[which]}, k), kDims, which).matrix();
    out += full * rho * full.adjoint();
  }
  return out;
}

// b^dag -> (b^dag + d^dag)/sqrt2, d^dag -> (b^dag - d^dag)/sqrt2.
Matrix beamsplitter() {
  const QOperator b = embed(annihilation(3), kDims, kB), d = embed(annihilation(3), kDims, kD);
  const Matrix g = (std::acos(-1.0) / 4) * (d.adjoint() * b - b.adjoint() * d).matrix();
  const Matrix flip_d = embed(parity_op(3), kDims, kD).matrix();
  return g.exp() * flip_d;
}

// |x>|0> -> |x>|x> on (qubit, photon): swaps |1,0> and |1,1>.
Matrix emission(int qubit, int photon) {
  const int n = total_dim(kDims);
  Matrix u = Matrix::Zero(n, n);
  std::vector<int> idx(4);
  for (int col = 0; col < n; ++col) {
    int rem = col;
    for (int s = 3; s >= 0; --s) {
      idx[s] = rem % kDims[s];
      rem /= kDims[s];
    }
    std::vector<int> to = idx;
    if (idx[qubit] == 1 && idx[photon] < 2) to[photon] = 1 - idx[photon];
    int row = 0;
    for (int s = 0; s < 4; ++s) row = row * kDims[s] + to[s];
    u(row, col) = 1.0;
  }
  return u;
}

Matrix detector_projector(DetectorKind kind, bool first) {
  Matrix p = Matrix::Zero(9, 9);
  for (int nb = 0; nb < 3; ++nb)
    for (int nd = 0; nd < 3; ++nd) {
      const int clicked = first ? nb : nd, dark = first ? nd : nb;
      const bool hit = kind == DetectorKind::number_resolving ? (clicked == 1 && dark == 0)
                                                              : (clicked >= 1 && dark == 0);
      if (hit) p(nb * 3 + nd, nb * 3 + nd) = 1.0;
    }
  return tensor({identity(4), QOperator({3, 3}, p)}).matrix();
}

struct Herald {
  bool first;
  double probability;
  Matrix rho_ac;
};

// Emits from both nodes, transmits, interferes and returns the two heralded
// single-click branches.
std::vector<Herald> emit_and_herald(const Matrix& rho_ac, double eta, DetectorKind kind) {
  Matrix vac = Matrix::Zero(9, 9);
  vac(0, 0) = 1.0;
  Matrix rho = tensor({QOperator({2, 2}, rho_ac), QOperator({3, 3}, vac)}).matrix();
  const Matrix e = emission(kA, kB) * emission(kC, kD);
  rho = e * rho * e.adjoint();
  rho = apply_loss(apply_loss(rho, eta, kB), eta, kD);
  const Matrix bs = beamsplitter();
  rho = bs * rho * bs.adjoint();

  std::vector<Herald> out;
  for (bool first : {true, false}) {
    const Matrix proj = detector_projector(kind, first);
    const Matrix post = proj * rho * proj;
    const double prob = post.trace().real();
    Matrix reduced = Matrix::Zero(4, 4);
    if (prob > 0.0) {
      const QState s = QState::unchecked(kDims, post / prob, StateKind::mixed);
      reduced = partial_trace(s, {kA, kC}).data();
    }
    out.push_back({first, prob, reduced});
  }
  return out;
}

}  // namespace

ProtocolOutcome simulate_link_protocol(double loss_per_arm, DetectorKind detectors, bool two_steps) {
  if (!(loss_per_arm >= 0.0 && loss_per_arm <= 1.0))
    throw std::invalid_argument("loss per arm must lie in [0, 1]");
  const double eta = 1.0 - loss_per_arm;

  // Each node starts in (|0> + |1>)/sqrt2 on its stationary qubit.
  Vector plus2(4);
  plus2.setConstant(0.5);
  const Matrix rho0 = plus2 * plus2.adjoint();

  ProtocolOutcome result;
  Matrix flip(4, 4);
  flip.setZero();
  flip(0, 3) = flip(1, 2) = flip(2, 1) = flip(3, 0) = 1.0;  // X (x) X

  for (const auto& h1 : emit_and_herald(rho0, eta, detectors)) {
    const std::string p1 = h1.first ? "D1" : "D2";
    if (!two_steps) {
      HeraldBranch br{p1, false, h1.probability, QState::unchecked({2, 2}, h1.rho_ac, StateKind::mixed)};
      result.success_probability += br.probability;
      result.branches.push_back(std::move(br));
      continue;
    }
    if (h1.probability <= 0.0) continue;
    const Matrix flipped = flip * h1.rho_ac * flip.adjoint();
    for (const auto& h2 : emit_and_herald(flipped, eta, detectors)) {
      HeraldBranch br;
      br.pattern = p1 + (h2.first ? ",D1" : ",D2");
      br.same_detector = h1.first == h2.first;
      br.probability = h1.probability * h2.probability;
      br.state = QState::unchecked({2, 2}, h2.rho_ac, StateKind::mixed);
      result.success_probability += br.probability;
      result.branches.push_back(std::move(br));
    }
  }
  return result;
}

}  // namespace catrep
