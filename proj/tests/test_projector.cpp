#include "support.hpp"

#include <numbers>

using namespace test;

namespace {

constexpr double kPi = std::numbers::pi;

struct Setup {
  Weight w;
  Polarization p;
  Amplitude a;
};

Setup setup(const TruncatedSeries& phi, int order, double trust = 1.5) {
  Setup s;
  s.w = weight_of(phi, trust);
  s.p = polarize(s.w);
  s.a = solve_amplitude(build_phase(s.p), order);
  estimate_growth(s.a, 0.3);
  return s;
}

TruncatedSeries monomial_u(int k) { return TruncatedSeries::monomial(1, 8, MultiIndex{k}, 1.0); }

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
  const GaussRule g = gauss_legendre(12);
  double s0 = 0.0, s10 = 0.0, s11 = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    CHECK(g.weights[i] > 0.0);
    s0 += g.weights[i];
    s10 += g.weights[i] * std::pow(g.nodes[i], 10);
    s11 += g.weights[i] * std::pow(g.nodes[i], 11);
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s10 == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
  CHECK(std::abs(s11) < 1e-15);
}

TEST_CASE("domain quadrature") {
  const DomainSpec d = DomainSpec::build(DomainShape::Disc, 1, {Complex(0.1, 0.0)}, 0.7, 32, 64, 0.1, {0.5});
  double area = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.weights[i] > 0.0);
    CHECK(d.contains(d.nodes[i]));
    area += d.weights[i];
    m2 += d.weights[i] * std::norm(d.nodes[i][0] - 0.1);
  }
  CHECK(area == doctest::Approx(kPi * 0.49).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(kPi * std::pow(0.7, 4) / 2.0).epsilon(1e-13));
  CHECK(d.refined().size() == 4 * d.size());

  const DomainSpec poly = DomainSpec::build(DomainShape::Polydisc, 2, {0.0, 0.0}, 0.5, 12, 16, 0.1);
  const DomainSpec ball = DomainSpec::build(DomainShape::Ball, 2, {0.0, 0.0}, 0.5, 12, 16, 0.1);
  double ap = 0.0, ab = 0.0;
  for (double w : poly.weights) ap += w;
  for (double w : ball.weights) ab += w;
  CHECK(ap == doctest::Approx(std::pow(kPi * 0.25, 2)).epsilon(1e-12));
  CHECK(ab == doctest::Approx(kPi * kPi * std::pow(0.5, 4) / 2.0).epsilon(1e-12));

  expect_error([] { domain_shape_from_string("square"); }, ErrorKind::ConfigInvalid);
}

TEST_CASE("assembled kernel on quadratic weights") {
  const Setup g = setup(quadratic_phi(0.5, 16), 6);
  for (double h : {0.2, 0.1, 0.05}) {
    const KernelEvaluator k = assemble_kernel(g.p, g.a, h);
    CHECK(std::abs(k({0.0}, {0.0}) - 1.0 / (kPi * h)) < 1e-12 / h);
    const Point x{Complex(0.3, 0.0)};
    const Complex want = std::exp(0.09 / h) / (kPi * h);
    CHECK(std::abs(k(x, x) - want) / std::abs(want) < 1e-12);
    const Point y{Complex(-0.1, 0.2)};
    const Complex wxy = std::exp(x[0] * std::conj(y[0]) / h) / (kPi * h);
    CHECK(std::abs(k(x, y) - wxy) / std::abs(wxy) < 1e-12);
  }
  const Setup l = setup(quadratic_phi(1.0, 16), 6);
  CHECK(std::abs(assemble_kernel(l.p, l.a, 0.1)({0.0}, {0.0}) - 2.0 / (kPi * 0.1)) < 1e-11);

  // Real and positive on the diagonal for the perturbed weight too.
  const Setup q = setup(quartic_phi(0.1, 20), 8, 1.0);
  const KernelEvaluator kq = assemble_kernel(q.p, q.a, 0.1);
  for (const auto& t : sample_ball_tuples(1, 1, 0.4, 20, 3)) {
    const Complex v = kq(t[0], t[0]);
    CHECK(v.real() > 0.0);
    CHECK(std::abs(v.imag()) < 1e-12 * v.real());
  }
}

TEST_CASE("projection of Gaussian test functions") {
  const Setup g = setup(quadratic_phi(0.5, 16), 6);
  const double h = 0.1;
  const KernelEvaluator k = assemble_kernel(g.p, g.a, h);
  const DomainSpec V = DomainSpec::build(DomainShape::Disc, 1, {0.0}, 1.0, 64, 128, h);
  const auto v1 = apply_projection(k, monomial_u(0), g.w, V, {{0.0}});
  CHECK(std::abs(v1[0] - 1.0) < 1e-4);
  const auto vy = apply_projection(k, monomial_u(1), g.w, V, {{0.0}, {0.2}});
  CHECK(std::abs(vy[0]) < 1e-12);
  CHECK(std::abs(vy[1] - 0.2) < 1e-4);

  // Linear in u.
  const TruncatedSeries mix = monomial_u(0) * Complex(2.0, -1.0) + monomial_u(2) * Complex(0.5);
  const std::vector<Point> pts{{Complex(0.1, 0.1)}, {Complex(-0.2, 0.05)}};
  const auto a = apply_projection(k, monomial_u(0), g.w, V, pts);
  const auto b = apply_projection(k, monomial_u(2), g.w, V, pts);
  const auto c = apply_projection(k, mix, g.w, V, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(std::abs(c[i] - (Complex(2.0, -1.0) * a[i] + 0.5 * b[i])) < 1e-13 * std::abs(c[i]));
  }

  const DomainSpec outside = DomainSpec::build(DomainShape::Disc, 1, {0.0}, 2.0, 16, 32, h);
  expect_error([&] { apply_projection(k, monomial_u(0), g.w, outside, {{0.0}}); }, ErrorKind::ConfigInvalid);

  const DomainSpec coarse = DomainSpec::build(DomainShape::Disc, 1, {0.0}, 1.0, 4, 8, h);
  expect_error([&] { apply_projection(k, monomial_u(3), g.w, coarse, {{Complex(0.3, 0.1)}}); },
               ErrorKind::QuadratureUnderresolved);
}

TEST_CASE("reproducing error on the Gaussian") {
  const Setup g = setup(quadratic_phi(0.5, 16), 6);
  auto err = [&](double h, const TruncatedSeries& u) {
    const DomainSpec V = DomainSpec::build(DomainShape::Disc, 1, {0.0}, 1.0, 48, 96, h);
    const DomainSpec U = DomainSpec::build(DomainShape::Disc, 1, {0.0}, 0.5, 12, 24, h);
    return reproducing_error(assemble_kernel(g.p, g.a, h), u, g.w, U, V);
  };
  const double e10 = err(0.1, monomial_u(0));
  const double e05 = err(0.05, monomial_u(0));
  CHECK(e10 <= 1e-3);
  CHECK(e05 < e10);
  CHECK(err(0.1, TruncatedSeries(1, 8)) == 0.0);

  const DomainSpec V = DomainSpec::build(DomainShape::Disc, 1, {0.0}, 0.5, 8, 16, 0.1);
  expect_error([&] { reproducing_error(assemble_kernel(g.p, g.a, 0.1), monomial_u(0), g.w, V, V); },
               ErrorKind::ConfigInvalid);
}

TEST_CASE("decay fit") {
  std::vector<std::pair<double, double>> exp_data, pow_data;
  for (double h : {0.2, 0.1, 0.05}) {
    exp_data.emplace_back(h, std::exp(-0.5 / h));
    pow_data.emplace_back(h, h * h);
  }
  const DecayFit f = decay_fit(exp_data);
  CHECK(std::abs(f.beta - 0.5) < 1e-12);
  CHECK(std::abs(f.r2 - 1.0) < 1e-12);

  const DecayFit p = decay_fit(pow_data);
  CHECK(p.r2 < p.loglog_r2);
  CHECK(std::abs(p.loglog_slope - 2.0) < 1e-12);

  expect_error([] { decay_fit({{0.2, 1e-15}, {0.1, 1e-15}, {0.05, 1e-15}}); }, ErrorKind::DegenerateFit);
  expect_error([] { decay_fit({{0.2, 1e-3}, {0.1, 1e-4}}); }, ErrorKind::DegenerateFit);
  expect_error([] { decay_fit({{0.2, 1e-3}, {0.1, 0.0}, {0.05, 1e-5}}); }, ErrorKind::DegenerateFit);
}

TEST_CASE("order sensitivity") {
  const std::vector<double> h{0.2, 0.1, 0.05};
  std::vector<double> lo, hi, flat;
  for (double x : h) {
    lo.push_back(x * x * x);
    hi.push_back(x * x * x * x);
    flat.push_back(2.0 * x * x * x);
  }
  const OrderSensitivity good = order_sensitivity(h, lo, hi);
  CHECK(good.pass);
  for (double p : good.exponent) CHECK(std::abs(p - 1.0) < 1e-12);
  CHECK_FALSE(order_sensitivity(h, lo, flat).pass);
  expect_error([&] { order_sensitivity({0.1}, {1.0}, {1.0}); }, ErrorKind::DegenerateFit);
}
