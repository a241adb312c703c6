#include <gtest/gtest.h>

#include <cmath>

#include "catrep/qcore.hpp"

using namespace catrep;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST(Annihilation, TwoLevel) {
  const Matrix a = annihilation(2).matrix();
  EXPECT_EQ(a(0, 1), cplx(1.0));
  EXPECT_EQ(a(0, 0), cplx(0.0));
  EXPECT_EQ(a(1, 0), cplx(0.0));
  EXPECT_EQ(a(1, 1), cplx(0.0));
}

TEST(Annihilation, SuperdiagonalEntries) {
  const Matrix a = annihilation(3).matrix();
  EXPECT_NEAR(a(1, 2).real(), kSqrt2, 1e-15);
  EXPECT_THROW(annihilation(1), std::invalid_argument);
}

TEST(Annihilation, NumberOperatorEigenvalue) {
  const QState two = fock(2, 5);
  EXPECT_NEAR(expectation(number_op(5), two).real(), 2.0, 1e-14);
}

TEST(Annihilation, CommutatorIsIdentityBelowTruncation) {
  const int d = 12;
  const Matrix a = annihilation(d).matrix();
  const Matrix c = a * a.adjoint() - a.adjoint() * a;
  EXPECT_LT((c.topLeftCorner(d - 1, d - 1) - Matrix::Identity(d - 1, d - 1)).norm(), 1e-12);
}

TEST(CoherentState, VacuumAtZero) {
  EXPECT_NEAR(state_fidelity(coherent_state(0.0, 10), fock(0, 10)), 1.0, 1e-15);
}

TEST(CoherentState, MeanField) {
  const QState s = coherent_state(kSqrt2, 20);
  EXPECT_NEAR(std::abs(expectation(annihilation(20), s) - cplx(kSqrt2)), 0.0, 1e-8);
}

TEST(CoherentState, OverlapWithMirrorImage) {
  const QState p = coherent_state(kSqrt2, 20);
  const QState m = coherent_state(-kSqrt2, 20);
  const cplx ov = (p.vector().adjoint() * m.vector())(0);
  EXPECT_NEAR(ov.real(), std::exp(-4.0), 1e-8);
  EXPECT_NEAR(ov.imag(), 0.0, 1e-12);
}

TEST(CoherentState, TwoPhotonEigenstate) {
  // a^2 cannot reach the top two levels from inside the truncation, so the
  // eigen-relation is checked on the block below them.
  const int d = 20;
  const Matrix a = annihilation(d).matrix();
  for (double sign : {1.0, -1.0}) {
    const Vector psi = coherent_state(sign * kSqrt2, d).vector();
    const Vector r = a * a * psi - 2.0 * psi;
    EXPECT_LT(r.head(d - 2).norm(), 1e-8);
  }
  const Matrix a30 = annihilation(30).matrix();
  const Vector psi30 = coherent_state(kSqrt2, 30).vector();
  EXPECT_LT((a30 * a30 * psi30 - 2.0 * psi30).norm(), 1e-8);
}

TEST(CatState, EvenAtZeroIsVacuum) {
  EXPECT_NEAR(state_fidelity(cat_state(0.0, Parity::even, 8), fock(0, 8)), 1.0, 1e-14);
}

TEST(CatState, OddAtZeroIsDegenerate) { EXPECT_THROW(cat_state(0.0, Parity::odd, 8), DegenerateInput); }

TEST(CatState, OppositeParitiesAreOrthogonal) {
  const Vector e = cat_state(kSqrt2, Parity::even, 20).vector();
  const Vector o = cat_state(kSqrt2, Parity::odd, 20).vector();
  EXPECT_LT(std::abs((e.adjoint() * o)(0)), 1e-10);
}

TEST(CatState, EvenCatHasOnlyEvenPhotonNumbers) {
  const Vector e = cat_state(kSqrt2, Parity::even, 20).vector();
  double odd = 0.0;
  for (int n = 1; n < 20; n += 2) odd += std::norm(e(n));
  EXPECT_LT(odd, 1e-10);
}

TEST(CatState, Normalized) {
  for (double a : {0.5, kSqrt2, 2.0})
    for (Parity p : {Parity::even, Parity::odd}) EXPECT_NEAR(cat_state(a, p, 24).vector().norm(), 1.0, 1e-10);
}

TEST(Tensor, IdentityProduct) {
  const QOperator id = tensor({identity(2), identity(3)});
  EXPECT_EQ(id.dims(), (Dims{2, 3}));
  EXPECT_LT((id.matrix() - Matrix::Identity(6, 6)).norm(), 1e-15);
}

TEST(Tensor, CommutingFactors) {
  const QOperator a = annihilation(3);
  const QOperator lhs = tensor({a, identity(3)}) * tensor({identity(3), a});
  EXPECT_LT((lhs.matrix() - tensor({a, a}).matrix()).norm(), 1e-14);
}

TEST(Tensor, RejectsMixedKinds) {
  const QState p = fock(0, 2);
  const QState m = fock(1, 2).to_mixed();
  EXPECT_THROW(tensor({p, m}), std::invalid_argument);
}

TEST(PartialTrace, RecoversProductFactors) {
  const QState a = coherent_state(0.7, 6);
  const QState b = cat_state(1.0, Parity::odd, 7);
  const QState ab = tensor({a, b}).to_mixed();
  EXPECT_LT((partial_trace(ab, {0}).density() - a.density()).norm(), 1e-12);
  EXPECT_LT((partial_trace(ab, {1}).density() - b.density()).norm(), 1e-12);
  EXPECT_NEAR(partial_trace(ab, {1}).trace(), 1.0, 1e-10);
}

TEST(PartialTrace, BellStateGivesMaximallyMixedQubit) {
  Vector psi = Vector::Zero(4);
  psi(0) = psi(3) = 1.0 / kSqrt2;
  const QState bell = QState::pure({2, 2}, psi).to_mixed();
  const Matrix r = partial_trace(bell, {0}).density();
  EXPECT_LT((r - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(PartialTrace, EmptyKeepRejected) {
  const QState s = tensor({fock(0, 2), fock(1, 2)}).to_mixed();
  EXPECT_THROW(partial_trace(s, {}), std::invalid_argument);
}

TEST(StateFidelity, Conventions) {
  const QState psi = coherent_state(0.3, 6);
  EXPECT_NEAR(state_fidelity(psi.to_mixed(), psi), 1.0, 1e-14);
  EXPECT_NEAR(state_fidelity(fock(0, 4), fock(1, 4)), 0.0, 1e-15);
  const Matrix rho = 0.5 * fock(0, 4).density() + 0.5 * fock(1, 4).density();
  EXPECT_NEAR(state_fidelity(QState::mixed({4}, rho), fock(0, 4)), 0.5, 1e-15);
  EXPECT_THROW(state_fidelity(psi, psi.to_mixed()), std::invalid_argument);
}

TEST(Parity, Expectations) {
  EXPECT_NEAR(parity_expectation(cat_state(kSqrt2, Parity::even, 20)), 1.0, 1e-8);
  EXPECT_NEAR(parity_expectation(fock(1, 4)), -1.0, 1e-15);
  EXPECT_NEAR(parity_expectation(coherent_state(kSqrt2, 24)), std::exp(-4.0), 1e-6);
}

TEST(QStateValidation, RejectsUnnormalizedAndNonPhysical) {
  Vector v = Vector::Zero(3);
  v(0) = 1.1;
  EXPECT_THROW(QState::pure({3}, v), std::invalid_argument);
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.5;
  rho(1, 1) = -0.5;
  EXPECT_THROW(QState::mixed({2}, rho), std::invalid_argument);
}

TEST(QOperatorChecks, HermiticityAndDims) {
  const QOperator x = annihilation(4) + creation(4);
  EXPECT_TRUE(x.is_hermitian());
  EXPECT_FALSE(annihilation(4).is_hermitian());
  EXPECT_THROW(annihilation(4).assert_hermitian(), std::logic_error);
  EXPECT_THROW(annihilation(3) + annihilation(4), std::invalid_argument);
}

TEST(Embed, MatchesExplicitTensor) {
  const Dims dims{3, 4};
  EXPECT_LT((embed(annihilation(4), dims, 1).matrix() - tensor({identity(3), annihilation(4)}).matrix()).norm(),
            1e-15);
}
