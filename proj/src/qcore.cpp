#include "catrep/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace catrep {

namespace {

constexpr double kPureNormTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kHermTol = 1e-10;
constexpr double kEigTol = -1e-9;

void check_dims(const Dims& dims) {
  if (dims.empty()) throw DegenerateInput("empty subsystem list");
  for (int d : dims)
    if (d < 1) throw DegenerateInput("subsystem dimension must be positive");
}

std::string dims_str(const Dims& dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  os << ']';
  return os.str();
}

}  // namespace

int total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

// -- QOperator ----------------------------------------------------------------

QOperator::QOperator(Dims dims, Matrix data) : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  const int n = total_dim(dims_);
  if (data_.rows() != n || data_.cols() != n)
    throw DegenerateInput("operator matrix is not " + std::to_string(n) + "x" + std::to_string(n) +
                          " for dims " + dims_str(dims_));
}

QOperator QOperator::adjoint() const { return {dims_, data_.adjoint()}; }

bool QOperator::is_hermitian(double tol) const {
  return (data_ - data_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

const QOperator& QOperator::assert_hermitian(double tol) const {
  if (!is_hermitian(tol)) throw std::logic_error("operator is not Hermitian");
  return *this;
}

void QOperator::check_same_dims(const QOperator& rhs) const {
  if (dims_ != rhs.dims_)
    throw DegenerateInput("dimension mismatch " + dims_str(dims_) + " vs " + dims_str(rhs.dims_));
}

QOperator QOperator::operator+(const QOperator& rhs) const {
  check_same_dims(rhs);
  return {dims_, data_ + rhs.data_};
}

QOperator QOperator::operator-(const QOperator& rhs) const {
  check_same_dims(rhs);
  return {dims_, data_ - rhs.data_};
}

QOperator QOperator::operator*(const QOperator& rhs) const {
  check_same_dims(rhs);
  return {dims_, data_ * rhs.data_};
}

QOperator QOperator::operator*(cplx s) const { return {dims_, data_ * s}; }

// -- QState -------------------------------------------------------------------

QState::QState(Dims dims, Matrix data, StateKind kind)
    : dims_(std::move(dims)), data_(std::move(data)), kind_(kind) {
  check_dims(dims_);
  const int n = total_dim(dims_);
  const bool ok = kind_ == StateKind::pure ? (data_.rows() == n && data_.cols() == 1)
                                           : (data_.rows() == n && data_.cols() == n);
  if (!ok) throw DegenerateInput("state data does not match dims " + dims_str(dims_));
}

QState QState::pure(Dims dims, Vector psi) {
  QState s(std::move(dims), Matrix(psi), StateKind::pure);
  const double norm = s.data_.norm();
  if (std::abs(norm - 1.0) > kPureNormTol)
    throw DegenerateInput("pure state not normalised (norm " + std::to_string(norm) + ")");
  return s;
}

QState QState::mixed(Dims dims, Matrix rho) {
  QState s(std::move(dims), std::move(rho), StateKind::mixed);
  if ((s.data_ - s.data_.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
    throw DegenerateInput("density matrix is not Hermitian");
  if (std::abs(s.trace() - 1.0) > kTraceTol)
    throw DegenerateInput("density matrix trace " + std::to_string(s.trace()) + " != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.data_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigTol)
    throw DegenerateInput("density matrix has a negative eigenvalue");
  return s;
}

QState QState::unchecked(Dims dims, Matrix data, StateKind kind) {
  return QState(std::move(dims), std::move(data), kind);
}

Vector QState::vector() const {
  if (!is_pure()) throw std::logic_error("mixed state has no state vector");
  return data_.col(0);
}

Matrix QState::density() const {
  if (is_pure()) return data_ * data_.adjoint();
  return data_;
}

QState QState::to_mixed() const { return QState(dims_, density(), StateKind::mixed); }

double QState::trace() const {
  if (is_pure()) return data_.squaredNorm();
  return data_.trace().real();
}

double QState::purity() const {
  if (is_pure()) return std::pow(data_.squaredNorm(), 2);
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return data_.squaredNorm();
}

// -- single mode --------------------------------------------------------------

QOperator annihilation(int dim) {
  if (dim < 2) throw DegenerateInput("annihilation operator needs dim >= 2");
  Matrix a = Matrix::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return {{dim}, a};
}

QOperator creation(int dim) { return annihilation(dim).adjoint(); }

QOperator number_op(int dim) {
  if (dim < 1) throw DegenerateInput("dim must be positive");
  Matrix n = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return {{dim}, n};
}

QOperator identity(int dim) { return {{dim}, Matrix::Identity(dim, dim)}; }

QOperator identity(const Dims& dims) {
  const int n = total_dim(dims);
  return {dims, Matrix::Identity(n, n)};
}

QOperator parity_op(int dim) {
  Matrix p = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return {{dim}, p};
}

QState fock(int n, int dim) {
  if (n < 0 || n >= dim) throw DegenerateInput("Fock level outside truncation");
  Vector v = Vector::Zero(dim);
  v(n) = 1.0;
  return QState::pure({dim}, v);
}

namespace {

Vector coherent_vector(cplx alpha, int dim) {
  Vector v(dim);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

}  // namespace

QState coherent_state(cplx alpha, int dim) {
  if (dim < 2) throw DegenerateInput("coherent state needs dim >= 2");
  Vector v = coherent_vector(alpha, dim);
  return QState::pure({dim}, v / v.norm());
}

QState cat_state(cplx alpha, Parity parity, int dim) {
  if (dim < 2) throw DegenerateInput("cat state needs dim >= 2");
  const double sign = parity == Parity::even ? 1.0 : -1.0;
  Vector v = coherent_vector(alpha, dim) + sign * coherent_vector(-alpha, dim);
  const double norm = v.norm();
  if (norm < 1e-12)
    throw DegenerateInput("cat state with alpha = 0 and odd parity is the zero vector");
  return QState::pure({dim}, v / norm);
}

// -- composites ---------------------------------------------------------------

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

QOperator tensor(std::span<const QOperator> parts) {
  if (parts.empty()) throw DegenerateInput("tensor of an empty list");
  Dims dims = parts[0].dims();
  Matrix m = parts[0].matrix();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    m = kron(m, parts[i].matrix());
    dims.insert(dims.end(), parts[i].dims().begin(), parts[i].dims().end());
  }
  return {dims, m};
}

QOperator tensor(std::initializer_list<QOperator> parts) {
  return tensor(std::span<const QOperator>(parts.begin(), parts.size()));
}

QState tensor(std::span<const QState> parts) {
  if (parts.empty()) throw DegenerateInput("tensor of an empty list");
  const StateKind kind = parts[0].kind();
  for (const auto& p : parts)
    if (p.kind() != kind) throw DegenerateInput("tensor of mixed pure/density-matrix states");
  Dims dims = parts[0].dims();
  Matrix m = parts[0].data();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    m = kron(m, parts[i].data());
    dims.insert(dims.end(), parts[i].dims().begin(), parts[i].dims().end());
  }
  return QState::unchecked(dims, m, kind);
}

QState tensor(std::initializer_list<QState> parts) {
  return tensor(std::span<const QState>(parts.begin(), parts.size()));
}

QOperator embed(const QOperator& op, const Dims& dims, int which) {
  if (which < 0 || which >= static_cast<int>(dims.size()))
    throw DegenerateInput("embed: subsystem index out of range");
  if (op.dims().size() != 1 || op.dims()[0] != dims[which])
    throw DegenerateInput("embed: operator dims do not match subsystem");
  std::vector<QOperator> parts;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k)
    parts.push_back(k == which ? op : identity(dims[k]));
  return tensor(std::span<const QOperator>(parts));
}

QState partial_trace(const QState& state, std::vector<int> keep) {
  if (keep.empty()) throw DegenerateInput("partial trace needs a non-empty keep set");
  const Dims& dims = state.dims();
  const int nsub = static_cast<int>(dims.size());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int k : keep)
    if (k < 0 || k >= nsub) throw DegenerateInput("partial trace: subsystem index out of range");

  std::vector<int> traced;
  for (int k = 0; k < nsub; ++k)
    if (!std::binary_search(keep.begin(), keep.end(), k)) traced.push_back(k);

  Dims kdims, tdims;
  for (int k : keep) kdims.push_back(dims[k]);
  for (int k : traced) tdims.push_back(dims[k]);
  const int nk = total_dim(kdims);
  const int nt = traced.empty() ? 1 : total_dim(tdims);

  std::vector<int> stride(nsub, 1);
  for (int k = nsub - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];

  // full index for (kept multi-index, traced multi-index)
  auto compose = [&](int kidx, int tidx) {
    int full = 0;
    for (int p = static_cast<int>(keep.size()) - 1; p >= 0; --p) {
      full += (kidx % kdims[p]) * stride[keep[p]];
      kidx /= kdims[p];
    }
    for (int p = static_cast<int>(traced.size()) - 1; p >= 0; --p) {
      full += (tidx % tdims[p]) * stride[traced[p]];
      tidx /= tdims[p];
    }
    return full;
  };

  std::vector<int> table(static_cast<std::size_t>(nk) * nt);
  for (int i = 0; i < nk; ++i)
    for (int t = 0; t < nt; ++t) table[static_cast<std::size_t>(i) * nt + t] = compose(i, t);

  const Matrix rho = state.density();
  Matrix out = Matrix::Zero(nk, nk);
  for (int i = 0; i < nk; ++i)
    for (int j = 0; j < nk; ++j) {
      cplx acc = 0.0;
      for (int t = 0; t < nt; ++t)
        acc += rho(table[static_cast<std::size_t>(i) * nt + t], table[static_cast<std::size_t>(j) * nt + t]);
      out(i, j) = acc;
    }
  return QState::unchecked(kdims, out, StateKind::mixed);
}

// -- metrics ------------------------------------------------------------------

double state_fidelity(const QState& rho, const QState& target) {
  if (!target.is_pure()) throw DegenerateInput("fidelity target must be a pure state");
  if (rho.dims() != target.dims())
    throw DegenerateInput("fidelity: dimension mismatch " + dims_str(rho.dims()) + " vs " +
                          dims_str(target.dims()));
  const Vector psi = target.vector();
  double f = 0.0;
  if (rho.is_pure())
    f = std::norm(psi.dot(rho.vector()));
  else
    f = psi.dot(rho.data() * psi).real();
  return std::clamp(f, 0.0, 1.0);
}

double parity_expectation(const QState& rho) {
  if (rho.dims().size() != 1) throw DegenerateInput("parity expectation needs a single mode");
  return expectation(parity_op(rho.dims()[0]), rho).real();
}

cplx expectation(const QOperator& op, const QState& state) {
  if (op.dims() != state.dims()) throw DegenerateInput("expectation: dimension mismatch");
  if (state.is_pure()) {
    const Vector psi = state.vector();
    return psi.dot(op.matrix() * psi);
  }
  return (op.matrix() * state.data()).trace();
}

double top_level_population(const QState& state, int which, int levels) {
  const Dims& dims = state.dims();
  QState reduced = dims.size() == 1 ? state : partial_trace(state, {which});
  const int d = reduced.dims()[0];
  const Matrix rho = reduced.density();
  double pop = 0.0;
  for (int k = std::max(0, d - levels); k < d; ++k) pop += rho(k, k).real();
  return pop;
}

}  // namespace catrep
