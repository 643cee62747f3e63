#include "support.hpp"

using namespace test;

namespace {

PhaseData phase_of(const TruncatedSeries& phi, double trust = 1.0) {
  return build_phase(polarize(weight_of(phi, trust)));
}

// Hessian of phi4 in the integration variables (x, yt) at the base point,
// assembled straight from the series coefficients.
Eigen::MatrixXcd integration_hessian(const PhaseData& pd) {
  const int n = pd.n;
  Eigen::MatrixXcd H(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = 0; b < 2 * n; ++b) {
      MultiIndex m(4 * n);
      m.set(2 * n + a, (a == b) ? 2 : 1);
      if (a != b) m.set(2 * n + b, 1);
      H(a, b) = pd.phi4.coeff(m) * ((a == b) ? 2.0 : 1.0);
    }
  }
  return H;
}

}  // namespace

TEST_CASE("Gaussian phase telescopes to (x - y)(yt - xt) / 2") {
  const PhaseData pd = phase_of(quadratic_phi(0.5, 8));
  // variables (y, xt, x, yt)
  CHECK(std::abs(pd.phi4.coeff(MultiIndex{0, 0, 1, 1}) - 0.5) < 1e-15);
  CHECK(std::abs(pd.phi4.coeff(MultiIndex{0, 1, 1, 0}) + 0.5) < 1e-15);
  CHECK(std::abs(pd.phi4.coeff(MultiIndex{1, 0, 0, 1}) + 0.5) < 1e-15);
  CHECK(std::abs(pd.phi4.coeff(MultiIndex{1, 1, 0, 0}) - 0.5) < 1e-15);
  CHECK(pd.phi4.terms().size() == 4);
  CHECK(std::abs(pd.quad_b(0, 0).constant_term() - 0.5) < 1e-15);
  CHECK(pd.remainder.empty());
}

TEST_CASE("hess_det is (-1)^n det(B)^2") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const PhaseData pd = phase_of(quadratic_phi(lambda, 8));
    CHECK(std::abs(pd.hess_det + lambda * lambda) < 1e-12);
    CHECK(std::abs(pd.hess_det - integration_hessian(pd).determinant()) < 1e-12);
  }
  const PhaseData pq = phase_of(quartic_phi(0.1, 10));
  CHECK(std::abs(pq.hess_det - integration_hessian(pq).determinant()) < 1e-12);

  TruncatedSeries phi(4, 6);
  phi.set(MultiIndex{1, 0, 1, 0}, 1.0);
  phi.set(MultiIndex{0, 1, 0, 1}, 2.0);
  phi.set(MultiIndex{1, 0, 0, 1}, 0.25);
  phi.set(MultiIndex{0, 1, 1, 0}, 0.25);
  const PhaseData p2 = build_phase(polarize(validate_weight(phi, {0.0, 0.0})));
  const Complex detb = 1.0 * 2.0 - 0.25 * 0.25;
  CHECK(std::abs(p2.hess_det - detb * detb) < 1e-12);
  CHECK(std::abs(p2.hess_det - integration_hessian(p2).determinant()) < 1e-12);
}

TEST_CASE("phi ignores f(x) + g(yt) added to Psi") {
  std::mt19937_64 rng(29);
  const Weight w = weight_of(quartic_phi(0.1, 10));
  Polarization p = polarize(w);
  const PhaseData base = build_phase(p);
  for (int d = 1; d <= 3; ++d) {
    p.psi.add_to(MultiIndex{d, 0}, random_complex(rng));
    p.psi.add_to(MultiIndex{0, d}, random_complex(rng));
  }
  const PhaseData shifted = build_phase(p);
  CHECK(max_abs_diff(base.phi4, shifted.phi4) == 0.0);
}

TEST_CASE("critical structure") {
  std::mt19937_64 rng(31);
  TruncatedSeries phi = quartic_phi(0.1, 8);
  phi.set(MultiIndex{2, 1}, Complex(0.03, 0.01));
  phi.set(MultiIndex{1, 2}, Complex(0.03, -0.01));
  const PhaseData pd = phase_of(phi);
  // phi = 0 and all first derivatives vanish on x = y, yt = xt.
  const int deg = pd.phi4.maxdeg();
  std::vector<TruncatedSeries> diag{TruncatedSeries::variable(2, deg, 0), TruncatedSeries::variable(2, deg, 1),
                                    TruncatedSeries::variable(2, deg, 0), TruncatedSeries::variable(2, deg, 1)};
  CHECK(substitute(pd.phi4, diag).sup_norm() < 1e-14);
  for (int v = 0; v < 4; ++v) CHECK(substitute(diff(pd.phi4, v), diag).sup_norm() < 1e-14);

  // Every quadratic monomial has one u and one v factor, u = x - y, v = yt - xt:
  // the degree-2 part of phi in (x, yt) at y = xt = 0 is only x yt.
  for (const auto& [m, c] : pd.phi4.terms()) {
    if (m[0] == 0 && m[1] == 0 && m.degree() == 2) {
      CHECK(m[2] == 1);
      CHECK(m[3] == 1);
    }
  }
  for (const auto& [m, coeff] : pd.remainder.terms()) CHECK(m.degree() >= 3);
}

TEST_CASE("amplitude contours") {
  const PhaseData g = phase_of(quadratic_phi(0.5, 8));
  const ContourSpec c = build_good_contour(g, {0.0}, {0.0});
  const Complex u(0.2, -0.1);
  const auto [x, yt] = c.amplitude_point({u});
  CHECK(std::abs(x[0] - u) < 1e-15);
  CHECK(std::abs(yt[0] + std::conj(u) / 2.0) < 1e-15);
  CHECK(std::abs(g.value({0.0}, {0.0}, x, yt).real() + std::norm(u) / 4.0) < 1e-15);

  const PhaseData l = phase_of(quadratic_phi(2.0, 8));
  const auto [xl, ytl] = build_good_contour(l, {0.0}, {0.0}).amplitude_point({u});
  CHECK(std::abs(ytl[0] + 2.0 * std::conj(u)) < 1e-15);
  CHECK(std::abs(l.value({0.0}, {0.0}, xl, ytl).real() + 4.0 * std::norm(u)) < 1e-14);

  TruncatedSeries phi(4, 6);
  phi.set(MultiIndex{1, 0, 1, 0}, 1.0);
  phi.set(MultiIndex{0, 1, 0, 1}, 2.0);
  const PhaseData p2 = build_phase(polarize(validate_weight(phi, {0.0, 0.0})));
  const Point u2{Complex(0.1, 0.2), Complex(-0.3, 0.05)};
  const auto [x2, yt2] = build_good_contour(p2, {0.0, 0.0}, {0.0, 0.0}).amplitude_point(u2);
  CHECK(std::abs(yt2[0] + std::conj(u2[0])) < 1e-15);
  CHECK(std::abs(yt2[1] + 2.0 * std::conj(u2[1])) < 1e-15);
  const double re = p2.value({0.0, 0.0}, {0.0, 0.0}, x2, yt2).real();
  CHECK(std::abs(re + std::norm(u2[0]) + 4.0 * std::norm(u2[1])) < 1e-14);
}

TEST_CASE("contour margins") {
  const Weight w = weight_of(quadratic_phi(0.5, 8), 2.0);
  const PhaseData pd = build_phase(polarize(w));
  ContourSpec c = build_good_contour(pd, {0.0}, {0.0});
  // -Re phi / (|u|^2 + |v|^2) = (|u|^2/4) / (5|u|^2/4)
  CHECK(verify_contour(pd, c, 0.5).margin == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(c.margin == doctest::Approx(0.2).epsilon(1e-12));
  ContourSpec inv = build_inversion_contour(w, {0.0});
  CHECK(verify_contour(w, inv, 0.5).margin == doctest::Approx(0.5).epsilon(1e-12));

  // Perturbed weight: on the contour Re phi = -|u|^2/4 + |u|^4/4, so the margin
  // shrinks as the radius grows and is lost beyond |u| = 1.
  const Weight q = weight_of(quartic_phi(1.0, 10), 3.0);
  const PhaseData pq = build_phase(polarize(q));
  double last = INFINITY;
  for (double r : {0.1, 0.3, 0.5}) {
    ContourSpec cq = build_good_contour(pq, {0.0}, {0.0});
    const double m = verify_contour(pq, cq, r, 4000).margin;
    CHECK(m < last);
    last = m;
  }
  ContourSpec cq = build_good_contour(pq, {0.0}, {0.0});
  expect_error([&] { verify_contour(pq, cq, 1.5, 4000); }, ErrorKind::BadContour);
}

TEST_CASE("inversion contour theta") {
  const Point x{Complex(0.1, 0.3)};
  const Point y{Complex(-0.2, 0.1)};
  const Complex i(0.0, 1.0);
  const auto g = build_inversion_contour(weight_of(quadratic_phi(0.5, 8)), x);
  CHECK(std::abs(g.theta(x, y)[0] - std::conj(y[0]) / i) < 1e-15);
  const auto l = build_inversion_contour(weight_of(quadratic_phi(2.0, 8)), x);
  CHECK(std::abs(l.theta(x, y)[0] - 4.0 * std::conj(y[0]) / i) < 1e-14);

  // |x|^2/2 + 0.1 |x|^4 at x = y = 0.2: theta = (2/i) (0.1 + 0.2 * 0.2 * 0.04).
  const Point p{0.2};
  const auto q = build_inversion_contour(weight_of(quartic_phi(0.1, 10)), p);
  CHECK(std::abs(q.theta(p, p)[0] - (2.0 / i) * 0.1016) < 1e-14);
}
