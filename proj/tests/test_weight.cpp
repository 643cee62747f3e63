#include "support.hpp"

using namespace test;

namespace {

// |x1|^2 + |x2|^2 + Re(x1 conj x2), variables (x1, x2, conj x1, conj x2).
TruncatedSeries coupled_phi(int maxdeg) {
  TruncatedSeries phi(4, maxdeg);
  phi.set(MultiIndex{1, 0, 1, 0}, 1.0);
  phi.set(MultiIndex{0, 1, 0, 1}, 1.0);
  phi.set(MultiIndex{1, 0, 0, 1}, 0.5);
  phi.set(MultiIndex{0, 1, 1, 0}, 0.5);
  return phi;
}

}  // namespace

TEST_CASE("validate_weight records the smallest Levi eigenvalue") {
  CHECK(weight_of(quadratic_phi(0.5, 6)).levi_min == doctest::Approx(0.5).epsilon(1e-14));

  const Weight w2 = validate_weight(coupled_phi(6), {0.0, 0.0});
  CHECK(w2.levi_min == doctest::Approx(0.5).epsilon(1e-14));
  const auto L = levi_form(w2, {0.0, 0.0});
  CHECK(std::abs(L(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(L(0, 1) - 0.5) < 1e-14);
  CHECK(std::abs(L(1, 1) - 1.0) < 1e-14);

  // Re(x^2) = (x^2 + conj x^2) / 2 is pluriharmonic.
  TruncatedSeries re_x2(2, 6);
  re_x2.set(MultiIndex{2, 0}, 0.5);
  re_x2.set(MultiIndex{0, 2}, 0.5);
  expect_error([&] { weight_of(re_x2); }, ErrorKind::Degenerate);

  TruncatedSeries skew = quadratic_phi(0.5, 6);
  skew.set(MultiIndex{2, 1}, 0.1);  // partner x conj x^2 missing
  expect_error([&] { weight_of(skew); }, ErrorKind::NotRealValued);

  expect_error([] { validate_weight(TruncatedSeries(3, 4), {0.0}); }, ErrorKind::VariableMismatch);
}

TEST_CASE("polarize relabels conj x as yt") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const Polarization p = polarize(weight_of(quadratic_phi(lambda, 6)));
    CHECK(p.psi.terms().size() == 1);
    CHECK(std::abs(p.psi.coeff(MultiIndex{1, 1}) - lambda) < 1e-15);
    CHECK(std::abs(p.b_matrix(0, 0) - lambda) < 1e-15);
  }
  const Polarization q = polarize(weight_of(quartic_phi(0.1, 8)));
  CHECK(std::abs(q.psi.coeff(MultiIndex{2, 2}) - 0.1) < 1e-15);
  CHECK(q.psi.terms().size() == 2);
}

TEST_CASE("Psi restricted to the antidiagonal is Phi") {
  std::mt19937_64 rng(3);
  // A real weight: Hermitian random perturbation of the Gaussian.
  TruncatedSeries phi = quadratic_phi(0.5, 6);
  for (int d = 3; d <= 6; ++d) {
    for (const auto& m : multi_indices_of_degree(2, d)) {
      if (m[0] < m[1]) continue;
      const Complex c = random_complex(rng, 0.05);
      phi.add_to(m, c);
      phi.add_to(MultiIndex{m[1], m[0]}, std::conj(c));
    }
  }
  const Weight w = weight_of(phi);
  const Polarization p = polarize(w);
  for (const auto& t : sample_ball_tuples(1, 1, 0.4, 50, 5)) {
    const Point& x = t[0];
    CHECK(std::abs(p.value_conj(x, x) - w.value(x)) < 1e-14);
  }
  // Uniqueness: the coefficients are exactly the relabelled ones.
  CHECK(max_abs_diff(p.psi, w.phi) == 0.0);
}

TEST_CASE("quadratic gap") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const Weight w = weight_of(quadratic_phi(lambda, 6));
    const GapEstimate g = quadratic_gap_estimate(w, polarize(w), 0.5);
    CHECK(g.cmin == doctest::Approx(lambda).epsilon(1e-10));
    CHECK(g.cmax == doctest::Approx(lambda).epsilon(1e-10));
  }
  const Weight w = weight_of(quartic_phi(0.1, 8));
  const GapEstimate g = quadratic_gap_estimate(w, polarize(w), 0.3);
  CHECK(g.cmin > 0.0);
  CHECK(g.cmin < 1.0);
  CHECK(std::isfinite(g.cmax));
  CHECK(g.cmax >= g.cmin);

  // -|x|^4 overwhelms the Gaussian far out.
  const Weight bad = weight_of(quartic_phi(-1.0, 8), 10.0);
  expect_error([&] { quadratic_gap_estimate(bad, polarize(bad), 2.0); }, ErrorKind::GapViolation);
}

TEST_CASE("levi_form away from the base") {
  const Weight g = weight_of(quadratic_phi(0.5, 6));
  CHECK(std::abs(levi_form(g, {Complex(0.3, -0.2)})(0, 0) - 0.5) < 1e-14);
  const Weight w = weight_of(quartic_phi(0.1, 8));
  CHECK(std::abs(levi_form(w, {0.0})(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(levi_form(w, {0.5})(0, 0) - 0.6) < 1e-14);
}

TEST_CASE("pluriharmonic terms shift Psi by (g(x) + g*(yt)) / 2") {
  std::mt19937_64 rng(23);
  const Weight w = weight_of(quartic_phi(0.1, 8));
  TruncatedSeries g(1, 8);
  for (int d = 1; d <= 3; ++d) g.set(MultiIndex{d}, random_complex(rng, 0.2));
  const Weight wg = weight_of(add_pluriharmonic(w.phi, g));
  const Polarization p = polarize(w);
  const Polarization pg = polarize(wg);
  for (int d = 1; d <= 3; ++d) {
    const Complex c = g.coeff(MultiIndex{d});
    CHECK(std::abs(pg.psi.coeff(MultiIndex{d, 0}) - p.psi.coeff(MultiIndex{d, 0}) - c / 2.0) < 1e-15);
    CHECK(std::abs(pg.psi.coeff(MultiIndex{0, d}) - p.psi.coeff(MultiIndex{0, d}) - std::conj(c) / 2.0) < 1e-15);
  }
  CHECK(std::abs(pg.psi.coeff(MultiIndex{2, 2}) - 0.1) < 1e-15);
}
