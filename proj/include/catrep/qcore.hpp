#pragma once

// Truncated Fock-space linear algebra shared by every dynamics module.
//
// Composite spaces use the Kronecker convention: the first subsystem is the
// most significant index, so tensor({A, B}) has matrix A (x) B.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace catrep {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<int>;

/// Input that makes a construction meaningless (zero vector, bad dims, ...).
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

int total_dim(const Dims& dims);

class QOperator {
 public:
  QOperator() = default;
  QOperator(Dims dims, Matrix data);

  const Dims& dims() const { return dims_; }
  const Matrix& matrix() const { return data_; }
  int size() const { return static_cast<int>(data_.rows()); }

  QOperator adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  /// Throws std::logic_error when the operator is not Hermitian to tol.
  const QOperator& assert_hermitian(double tol = 1e-12) const;

  QOperator operator+(const QOperator& rhs) const;
  QOperator operator-(const QOperator& rhs) const;
  QOperator operator*(const QOperator& rhs) const;
  QOperator operator*(cplx s) const;
  friend QOperator operator*(cplx s, const QOperator& op) { return op * s; }

 private:
  void check_same_dims(const QOperator& rhs) const;

  Dims dims_;
  Matrix data_;
};

enum class StateKind { pure, mixed };

class QState {
 public:
  QState() = default;

  /// Validated constructors. Pure vectors must be normalised to 1e-10;
  /// density matrices must be Hermitian with unit trace and eigenvalues
  /// no smaller than -1e-9.
  static QState pure(Dims dims, Vector psi);
  static QState mixed(Dims dims, Matrix rho);
  /// Skips validation. For engine outputs whose invariants are tracked
  /// separately with looser, documented tolerances.
  static QState unchecked(Dims dims, Matrix data, StateKind kind);

  const Dims& dims() const { return dims_; }
  StateKind kind() const { return kind_; }
  bool is_pure() const { return kind_ == StateKind::pure; }
  int size() const { return static_cast<int>(data_.rows()); }

  /// Column vector (pure) or square matrix (mixed).
  const Matrix& data() const { return data_; }
  Vector vector() const;
  Matrix density() const;
  QState to_mixed() const;

  double trace() const;
  double purity() const;

 private:
  QState(Dims dims, Matrix data, StateKind kind);

  Dims dims_;
  Matrix data_;
  StateKind kind_ = StateKind::pure;
};

// -- single-mode constructions ------------------------------------------------

QOperator annihilation(int dim);
QOperator creation(int dim);
QOperator number_op(int dim);
QOperator identity(int dim);
QOperator identity(const Dims& dims);
/// exp(i pi a^dag a)
QOperator parity_op(int dim);

QState fock(int n, int dim);
/// Truncated coherent state, renormalised after truncation.
QState coherent_state(cplx alpha, int dim);

enum class Parity { even, odd };
/// N(|alpha> +/- |-alpha>). Throws DegenerateInput for alpha = 0, odd.
QState cat_state(cplx alpha, Parity parity, int dim);

// -- composites ---------------------------------------------------------------

QOperator tensor(std::span<const QOperator> parts);
QOperator tensor(std::initializer_list<QOperator> parts);
/// Pure parts give a pure product; any mixture of pure and mixed parts is
/// rejected.
QState tensor(std::span<const QState> parts);
QState tensor(std::initializer_list<QState> parts);

/// Embeds a single-subsystem operator at position `which` of `dims`.
QOperator embed(const QOperator& op, const Dims& dims, int which);

/// Traces out every subsystem not listed in `keep` (kept in ascending order).
QState partial_trace(const QState& rho, std::vector<int> keep);

// -- metrics ------------------------------------------------------------------

/// <psi|rho|psi>; target must be pure.
double state_fidelity(const QState& rho, const QState& target);
/// Tr(rho exp(i pi a^dag a)) for a single-mode state.
double parity_expectation(const QState& rho);
cplx expectation(const QOperator& op, const QState& state);
/// Population in the top `levels` Fock levels of subsystem `which`.
double top_level_population(const QState& state, int which, int levels = 2);

}  // namespace catrep
