#include <doctest.h>

#include <cmath>
#include <random>

#include "steerkit/errors.hpp"
#include "steerkit/qstate.hpp"

using namespace steerkit;

namespace {

double max_abs(const MatrixXc& m) { return m.cwiseAbs().maxCoeff(); }

Matrix4c product(int idx) { return basis_state(idx).matrix(); }

}  // namespace

TEST_CASE("werner_state closed forms") {
  const DensityMatrix4 s = werner_state(1.0);
  CHECK(s(kHH, kHH).real() == doctest::Approx(0.0));
  CHECK(s(kHV, kHV).real() == doctest::Approx(0.5));
  CHECK(s(kVH, kVH).real() == doctest::Approx(0.5));
  CHECK(s(kVV, kVV).real() == doctest::Approx(0.0));
  CHECK(s(kHV, kVH).real() == doctest::Approx(-0.5));

  CHECK(max_abs(werner_state(0.0).matrix() - Matrix4c::Identity() / 4.0) < 1e-15);

  const DensityMatrix4 h = werner_state(0.5);
  Matrix4c expect = Matrix4c::Zero();
  expect.diagonal() << 0.125, 0.375, 0.375, 0.125;
  expect(kHV, kVH) = expect(kVH, kHV) = -0.25;
  CHECK(max_abs(h.matrix() - expect) < 1e-15);
}

TEST_CASE("werner parameter outside [0, 1] is a domain error") {
  CHECK_THROWS_AS(werner_state(1.2), DomainError);
  CHECK_THROWS_AS(werner_state(-0.1), DomainError);
  CHECK_THROWS_AS(werner_state(std::nan("")), DomainError);
}

TEST_CASE("density matrix validation") {
  Matrix4c m = Matrix4c::Identity() / 4.0;
  m(0, 1) = cplx(0.1, 0.0);
  CHECK_THROWS_AS(DensityMatrix4{m}, ValidationError);

  Matrix4c t = Matrix4c::Identity() / 2.0;
  CHECK_THROWS_AS(DensityMatrix4{t}, ValidationError);

  Matrix4c neg = Matrix4c::Zero();
  neg.diagonal() << 0.6, 0.6, -0.2, 0.0;
  CHECK_THROWS_AS(DensityMatrix4{neg}, ValidationError);

  const DensityMatrix4 fixed = DensityMatrix4::repaired(neg);
  CHECK(fixed.eigenvalues().minCoeff() >= 0.0);
  CHECK(std::abs(fixed.matrix().trace().real() - 1.0) < 1e-12);
}

TEST_CASE("bloch_decompose of reference states") {
  const BlochForm s = bloch_decompose(singlet_state());
  CHECK(s.a.norm() < 1e-15);
  CHECK(s.b.norm() < 1e-15);
  CHECK((s.T + Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);

  const BlochForm w = bloch_decompose(werner_state(0.37));
  CHECK((w.T + 0.37 * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);

  const BlochForm hh = bloch_decompose(basis_state(kHH));
  CHECK((hh.a - Vec3::UnitZ()).norm() < 1e-15);
  CHECK((hh.b - Vec3::UnitZ()).norm() < 1e-15);
  Mat3 zz = Mat3::Zero();
  zz(2, 2) = 1.0;
  CHECK((hh.T - zz).cwiseAbs().maxCoeff() < 1e-15);

  // H is the +1 eigenstate on each side, V the -1 one.
  const BlochForm hv = bloch_decompose(basis_state(kHV));
  CHECK(hv.a(2) == doctest::Approx(1.0));
  CHECK(hv.b(2) == doctest::Approx(-1.0));
}

TEST_CASE("decompose then reassemble is the identity on random states") {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix4 rho = random_state(rng);
    worst = std::max(worst, max_abs(bloch_reassemble(bloch_decompose(rho)) - rho.matrix()));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("canonical form of an already diagonal Werner frame") {
  const BlochForm c = canonical_form(bloch_decompose(werner_state(0.7)));
  CHECK(c.canonical);
  CHECK(c.a.norm() < 1e-15);
  CHECK(c.b.norm() < 1e-15);
  CHECK(is_canonical_shape(c.T));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(c.T(i, i)) == doctest::Approx(0.7));
}

TEST_CASE("canonical form undoes random local rotations") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const double mu = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Matrix4c rotated =
        apply_local_unitaries(werner_state(mu).matrix(), random_unitary2(rng), random_unitary2(rng));
    const BlochForm c = canonical_form(bloch_decompose(DensityMatrix4(rotated)));
    CHECK(is_canonical_shape(c.T));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(std::abs(c.T(i, i)) - mu) < 1e-10);
  }
}

TEST_CASE("canonical form properties on random states") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const BlochForm bf = bloch_decompose(random_state(rng));
    const BlochForm c = canonical_form(bf);

    // Proper rotations, T' = R_a T R_b^T, Bloch vectors rotated alongside.
    CHECK(c.rot_a.determinant() == doctest::Approx(1.0));
    CHECK(c.rot_b.determinant() == doctest::Approx(1.0));
    CHECK((c.rot_a * bf.T * c.rot_b.transpose() - c.T).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c.rot_a * bf.a - c.a).norm() < 1e-12);
    CHECK((c.rot_b * bf.b - c.b).norm() < 1e-12);

    const Eigen::Vector3d s0 = Eigen::JacobiSVD<Mat3>(bf.T).singularValues();
    const Eigen::Vector3d s1 = Eigen::JacobiSVD<Mat3>(c.T).singularValues();
    CHECK((s0 - s1).norm() < 1e-12);
    CHECK(c.T(0, 0) >= 0.0);
    CHECK(c.T(1, 1) >= 0.0);
    CHECK(is_canonical_shape(c.T));

    const BlochForm cc = canonical_form(c);
    CHECK((cc.T - c.T).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((cc.a - c.a).norm() < 1e-12);
    CHECK((cc.b - c.b).norm() < 1e-12);

    // The canonical frame is reachable by local unitaries: it is a state.
    CHECK_NOTHROW(DensityMatrix4(bloch_reassemble(c)));
  }
}

TEST_CASE("fidelity reference values") {
  std::mt19937_64 rng(4);
  const DensityMatrix4 r = random_state(rng);
  CHECK(fidelity(r, r) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(basis_state(kHH), basis_state(kHV)) == doctest::Approx(0.0));

  const double mu = 0.6;
  const double closed =
      0.25 * std::pow(std::sqrt((1 + 3 * mu) / 4) + 3 * std::sqrt((1 - mu) / 4), 2);
  CHECK(fidelity(maximally_mixed_state(), werner_state(mu)) == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("fidelity symmetry and local unitary invariance") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const DensityMatrix4 a = random_state(rng);
    const DensityMatrix4 b = random_state(rng);
    const double f = fidelity(a, b);
    CHECK(std::abs(f - fidelity(b, a)) < 1e-12);
    const Matrix2c ua = random_unitary2(rng);
    const Matrix2c ub = random_unitary2(rng);
    const DensityMatrix4 ra(apply_local_unitaries(a.matrix(), ua, ub));
    const DensityMatrix4 rb(apply_local_unitaries(b.matrix(), ua, ub));
    CHECK(std::abs(f - fidelity(ra, rb)) < 1e-10);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
}

TEST_CASE("werner states are invariant under U (x) U") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 100; ++rep) {
    const Matrix2c u = random_unitary2(rng);
    const Matrix4c w = werner_state(0.43).matrix();
    CHECK(max_abs(apply_local_unitaries(w, u, u) - w) < 1e-12);
  }
}

TEST_CASE("bloch_rotation matches conjugation") {
  std::mt19937_64 rng(7);
  const Matrix2c u = random_unitary2(rng);
  const Mat3 r = bloch_rotation(u);
  CHECK(r.determinant() == doctest::Approx(1.0));
  CHECK((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  const DensityMatrix4 rho = random_state(rng);
  const BlochForm bf = bloch_decompose(rho);
  const BlochForm rot =
      bloch_decompose(DensityMatrix4(apply_local_unitaries(rho.matrix(), u, Matrix2c::Identity())));
  CHECK((rot.a - r * bf.a).norm() < 1e-12);
  CHECK((rot.T - r * bf.T).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("closest_werner self match") {
  const WernerMatch m = closest_werner(werner_state(0.8));
  CHECK(std::abs(m.mu - 0.8) < 1e-6);
  CHECK(std::abs(m.fidelity - 1.0) < 1e-6);
}

TEST_CASE("closest_werner against a dense mu grid") {
  const Matrix4c mixed = 0.99 * werner_state(0.8).matrix() + 0.01 * product(kHH);
  const DensityMatrix4 rho(mixed);
  const WernerMatch m = closest_werner(rho);

  // Coarse scan, then a 1e-7 step scan around the coarse optimum.
  double best_mu = 0.0, best_f = -1.0;
  for (int i = 0; i <= 10000; ++i) {
    const double f = fidelity(rho, werner_state(i * 1e-4));
    if (f > best_f) {
      best_f = f;
      best_mu = i * 1e-4;
    }
  }
  const double lo = std::max(0.0, best_mu - 2e-4);
  for (int i = 0; i <= 4000; ++i) {
    const double mu = std::min(1.0, lo + i * 1e-7);
    const double f = fidelity(rho, werner_state(mu));
    if (f > best_f) {
      best_f = f;
      best_mu = mu;
    }
  }
  CHECK(std::abs(m.mu - best_mu) < 1e-6);
  CHECK(std::abs(m.fidelity - best_f) < 1e-6);
}

TEST_CASE("closest_werner at the edge of the Werner line") {
  const WernerMatch s = closest_werner(singlet_state());
  CHECK(s.mu == doctest::Approx(1.0));
  CHECK(s.fidelity == doctest::Approx(1.0));
  const WernerMatch m = closest_werner(maximally_mixed_state());
  CHECK(m.mu == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("lossy embedding limits") {
  std::mt19937_64 rng(8);
  const DensityMatrix4 rho = random_state(rng);

  const MatrixXc full = expand(lossy_embed(rho, 1.0, Party::Alice));
  CHECK(full.rows() == 6);
  CHECK(max_abs(full.topLeftCorner(4, 4) - rho.matrix()) < 1e-15);
  CHECK(max_abs(full.bottomRows(2)) < 1e-15);
  CHECK(max_abs(full.rightCols(2)) < 1e-15);

  const MatrixXc lost = expand(lossy_embed(rho, 0.0, Party::Alice));
  MatrixXc vac = MatrixXc::Zero(3, 3);
  vac(2, 2) = 1.0;
  CHECK(max_abs(lost - kron(vac, MatrixXc(rho.reduced(Party::Bob)))) < 1e-15);

  const MatrixXc lost_b = expand(lossy_embed(rho, 0.0, Party::Bob));
  CHECK(max_abs(lost_b - kron(MatrixXc(rho.reduced(Party::Alice)), vac)) < 1e-15);

  for (double e : {0.0, 0.3, 0.77, 1.0}) {
    CHECK(std::abs(expand(lossy_embed(rho, e, Party::Alice)).trace() - 1.0) < 1e-14);
    CHECK(std::abs(expand(lossy_embed(rho, e, Party::Bob)).trace() - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(lossy_embed(rho, 1.5, Party::Alice), DomainError);
  CHECK_THROWS_AS(lossy_embed(rho, -0.1, Party::Bob), DomainError);
}

TEST_CASE("partial traces of a product operator") {
  std::mt19937_64 rng(9);
  const Matrix2c a = random_state(rng).reduced(Party::Alice);
  const Matrix2c b = random_state(rng).reduced(Party::Bob);
  const MatrixXc ab = kron(MatrixXc(a), MatrixXc(b));
  CHECK(max_abs(partial_trace_first(ab, 2, 2) - b) < 1e-15);
  CHECK(max_abs(partial_trace_second(ab, 2, 2) - a) < 1e-15);
}
