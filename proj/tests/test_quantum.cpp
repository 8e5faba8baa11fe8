#include "polpair/quantum.hpp"

#include "oracles.hpp"
#include "polpair/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace polpair;

namespace {

JonesMatrix random_unitary(Rng& rng) {
  return JonesMatrix::from_angles(rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                                  rng.uniform(-kPi, kPi));
}

DensityMatrix phi_plus() {
  Vector4c v;
  v << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  return DensityMatrix::from_pure(PureState(v));
}

} // namespace

TEST_CASE("target_state produces the expected amplitudes") {
  const PureState hh = target_state(1.0, 0.0);
  CHECK(hh.amplitude(0).real() == doctest::Approx(1.0));
  CHECK(std::abs(hh.amplitude(3)) == doctest::Approx(0.0));

  const double r = 1.0 / std::sqrt(2.0);
  const PureState bell = target_state(r, r);
  CHECK(bell.amplitude(0).real() == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(bell.amplitude(3).real() == doctest::Approx(0.7071).epsilon(1e-4));

  const PureState nonmax = target_state(std::sqrt(0.6), std::sqrt(0.4));
  CHECK(nonmax.amplitude(0).real() == doctest::Approx(0.7745966692).epsilon(1e-9));
  CHECK(nonmax.amplitude(3).real() == doctest::Approx(0.6324555320).epsilon(1e-9));
  CHECK(std::abs(nonmax.amplitude(1)) == 0.0);
  CHECK(std::abs(nonmax.amplitude(2)) == 0.0);
}

TEST_CASE("target_state rejects bad inputs") {
  CHECK_THROWS_AS(target_state(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(target_state(0.9, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(target_state(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("type invariants are enforced") {
  Vector4c unnorm;
  unnorm << 1.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(PureState{unnorm}, std::invalid_argument);

  Matrix4c bad_trace = Matrix4c::Identity();
  CHECK_THROWS_AS(DensityMatrix{bad_trace}, std::invalid_argument);

  Matrix4c not_hermitian = Matrix4c::Identity() / 4.0;
  not_hermitian(0, 1) = Complex(0.1, 0.1);
  CHECK_THROWS_AS(DensityMatrix{not_hermitian}, std::invalid_argument);

  // Hermitian, unit trace, but indefinite.
  Matrix4c indefinite = Matrix4c::Zero();
  indefinite(0, 0) = 1.2;
  indefinite(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix{indefinite}, std::invalid_argument);

  Matrix2c shrink = Matrix2c::Identity() * 0.9;
  CHECK_THROWS_AS(JonesMatrix{shrink}, std::invalid_argument);
}

TEST_CASE("fidelity identities and frozen values") {
  Rng rng(2024);
  const DensityMatrix rho(oracles::random_density(rng));
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-9));

  const DensityMatrix hh = DensityMatrix::from_pure(target_state(1.0, 0.0));
  const DensityMatrix vv = DensityMatrix::from_pure(target_state(0.0, 1.0));
  CHECK(fidelity(hh, vv) == doctest::Approx(0.0).epsilon(1e-12));

  // Squared inner product ((sqrt(.6)+sqrt(.4))/sqrt(2))^2 = 0.9898979486.
  const DensityMatrix target =
      DensityMatrix::from_pure(target_state(std::sqrt(0.6), std::sqrt(0.4)));
  CHECK(fidelity(phi_plus(), target) == doctest::Approx(0.9898979486).epsilon(1e-9));
}

TEST_CASE("fidelity is symmetric and matches the eigenvalue-route oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho(oracles::random_density(rng));
    const DensityMatrix sigma(oracles::random_density(rng));
    const double f1 = fidelity(rho, sigma);
    const double f2 = fidelity(sigma, rho);
    CHECK(std::abs(f1 - f2) < 1e-9);
    CHECK(std::abs(f1 - oracles::fidelity_eigenroute(rho.matrix(), sigma.matrix())) < 1e-9);
  }
}

TEST_CASE("fidelity against a pure state equals the expectation value") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho(oracles::random_density(rng));
    const PureState psi = target_state(std::sqrt(0.6), std::sqrt(0.4));
    const double direct = fidelity(rho, psi);
    const double full = fidelity(rho, DensityMatrix::from_pure(psi));
    CHECK(direct ==
          doctest::Approx(oracles::fidelity_pure_loops(rho.matrix(), psi.amplitudes()))
              .epsilon(1e-12));
    CHECK(full == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("apply_local_rotation basics") {
  const DensityMatrix hh = DensityMatrix::from_pure(target_state(1.0, 0.0));
  const DensityMatrix same =
      apply_local_rotation(hh, JonesMatrix::identity(), JonesMatrix::identity());
  CHECK((same.matrix() - hh.matrix()).cwiseAbs().maxCoeff() < 1e-14);

  const DensityMatrix vv = apply_local_rotation(hh, JonesMatrix::flip(), JonesMatrix::flip());
  CHECK(vv.matrix()(3, 3).real() == doctest::Approx(1.0));

  CHECK_THROWS_AS(JonesMatrix{Matrix2c::Zero()}, std::invalid_argument);
}

TEST_CASE("Phi+ is invariant under U (x) U*") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const JonesMatrix u = random_unitary(rng);
    const JonesMatrix u_conj(u.matrix().conjugate());
    const DensityMatrix rotated = apply_local_rotation(phi_plus(), u, u_conj);
    const Matrix4c expected =
        oracles::rotate_loops(phi_plus().matrix(), u.matrix(), u_conj.matrix());
    CHECK((rotated.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((rotated.matrix() - phi_plus().matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rotation matches the loop oracle and preserves the spectrum") {
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix rho(oracles::random_density(rng));
    const JonesMatrix ja = random_unitary(rng);
    const JonesMatrix jb = random_unitary(rng);
    const DensityMatrix out = apply_local_rotation(rho, ja, jb);
    CHECK((out.matrix() - oracles::rotate_loops(rho.matrix(), ja.matrix(), jb.matrix()))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((out.eigenvalues() - rho.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("fidelity is invariant under joint local rotations") {
  Rng rng(15);
  for (int trial = 0; trial < 25; ++trial) {
    const DensityMatrix rho(oracles::random_density(rng));
    const DensityMatrix sigma(oracles::random_density(rng));
    const JonesMatrix ja = random_unitary(rng);
    const JonesMatrix jb = random_unitary(rng);
    const double before = fidelity(rho, sigma);
    const double after =
        fidelity(apply_local_rotation(rho, ja, jb), apply_local_rotation(sigma, ja, jb));
    CHECK(std::abs(before - after) < 1e-9);
  }
}

TEST_CASE("concurrence on known states") {
  CHECK(concurrence(DensityMatrix::from_pure(target_state(1.0, 0.0))) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK(concurrence(phi_plus()) == doctest::Approx(1.0).epsilon(1e-9));
  // 2 sqrt(0.6) sqrt(0.4) = 0.9797958971.
  CHECK(concurrence(DensityMatrix::from_pure(target_state(std::sqrt(0.6), std::sqrt(0.4)))) ==
        doctest::Approx(0.9797958971).epsilon(1e-9));
}

TEST_CASE("concurrence equals 2 a b along the target family") {
  for (int i = 0; i <= 20; ++i) {
    const double a = static_cast<double>(i) / 20.0;
    const double b = std::sqrt(1.0 - a * a);
    const DensityMatrix rho = DensityMatrix::from_pure(target_state(a, b));
    CHECK(std::abs(concurrence(rho) - 2.0 * a * b) < 1e-9);
  }
}

TEST_CASE("concurrence matches the Hermitian-route oracle on random states") {
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix rho(oracles::random_density(rng));
    CHECK(std::abs(concurrence(rho) - oracles::concurrence_hermitian_route(rho.matrix())) <
          1e-9);
  }
}

TEST_CASE("euler_angles round-trips Jones matrices") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const JonesMatrix j = random_unitary(rng);
    const auto ang = euler_angles(j);
    const JonesMatrix back = JonesMatrix::from_angles(ang[0], ang[1], ang[2]);
    // Equal up to a global phase.
    const Complex phase = (back.matrix().adjoint() * j.matrix()).trace() / 2.0;
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-9);
    CHECK((j.matrix() - phase * back.matrix()).cwiseAbs().maxCoeff() < 1e-9);
  }
}
