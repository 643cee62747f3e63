#include "support.hpp"

#include "bergman/io.hpp"

using namespace test;

namespace {

TruncatedSeries u1(int maxdeg, Complex c0, Complex c1) {
  TruncatedSeries s(1, maxdeg);
  s.set(MultiIndex{0}, c0);
  s.set(MultiIndex{1}, c1);
  return s;
}

bool coeff_equal(const TruncatedSeries& a, const TruncatedSeries& b, double tol = 1e-12) {
  return a.maxdeg() == b.maxdeg() && max_abs_diff(a, b) <= tol;
}

}  // namespace

TEST_CASE("add cancels and rejects mismatched variables") {
  const auto s = add(u1(3, 1.0, 1.0), u1(3, 1.0, -1.0));
  CHECK(s.coeff(MultiIndex{0}) == Complex(2.0));
  CHECK(s.coeff(MultiIndex{1}) == Complex(0.0));

  const Complex i(0.0, 1.0);
  CHECK(add(u1(3, 0.0, i), u1(3, 0.0, -i)).sup_norm() == 0.0);

  expect_error([] { add(TruncatedSeries(1, 2), TruncatedSeries(2, 2)); }, ErrorKind::VariableMismatch);
  expect_error([] { mul(TruncatedSeries(1, 2), TruncatedSeries(2, 2)); }, ErrorKind::VariableMismatch);
}

TEST_CASE("mul truncates at the smaller degree") {
  const auto d = mul(u1(2, 1.0, 1.0), u1(2, 1.0, -1.0));
  CHECK(d.coeff(MultiIndex{0}) == Complex(1.0));
  CHECK(d.coeff(MultiIndex{1}) == Complex(0.0));
  CHECK(d.coeff(MultiIndex{2}) == Complex(-1.0));

  const auto sq = mul(u1(1, 1.0, 1.0), u1(1, 1.0, 1.0));
  CHECK(sq.maxdeg() == 1);
  CHECK(sq.coeff(MultiIndex{1}) == Complex(2.0));
  CHECK(sq.terms().size() == 2);

  const Complex i(0.0, 1.0);
  CHECK(mul(u1(3, 0.0, i), u1(3, 0.0, i)).coeff(MultiIndex{2}) == Complex(-1.0));

  // maxdeg = min of inputs
  CHECK(mul(TruncatedSeries(1, 2), TruncatedSeries(1, 5)).maxdeg() == 2);
}

TEST_CASE("diff lowers the degree") {
  const auto u3 = TruncatedSeries::monomial(2, 4, MultiIndex{3, 0}, 1.0);
  const auto d = diff(u3, 0);
  CHECK(d.maxdeg() == 3);
  CHECK(d.coeff(MultiIndex{2, 0}) == Complex(3.0));
  CHECK(diff(TruncatedSeries::monomial(2, 4, MultiIndex{2, 0}, 1.0), 1).empty());
  const auto uv = diff(TruncatedSeries::monomial(2, 4, MultiIndex{1, 1}, 1.0), 0);
  CHECK(uv.coeff(MultiIndex{0, 1}) == Complex(1.0));
  CHECK(uv.terms().size() == 1);
  expect_error([&] { diff(u3, 2); }, ErrorKind::BadVariable);
}

TEST_CASE("substitute composes and demands centered substitutions") {
  const auto u2 = TruncatedSeries::monomial(2, 2, MultiIndex{2, 0}, 1.0);
  const std::vector<TruncatedSeries> shift{TruncatedSeries::variable(2, 2, 0) + TruncatedSeries::variable(2, 2, 1),
                                           TruncatedSeries::variable(2, 2, 1)};
  const auto r = substitute(u2, shift);
  CHECK(r.coeff(MultiIndex{2, 0}) == Complex(1.0));
  CHECK(r.coeff(MultiIndex{1, 1}) == Complex(2.0));
  CHECK(r.coeff(MultiIndex{0, 2}) == Complex(1.0));

  const std::vector<TruncatedSeries> zero{TruncatedSeries(1, 3)};
  CHECK(substitute(TruncatedSeries::variable(1, 3, 0), zero).empty());

  const std::vector<TruncatedSeries> one{TruncatedSeries::constant(1, 3, 1.0)};
  expect_error([&] { substitute(TruncatedSeries::variable(1, 3, 0), one); }, ErrorKind::NonzeroConstantTerm);
  const std::vector<TruncatedSeries> wrong{TruncatedSeries::variable(1, 3, 0)};
  expect_error([&] { substitute(u2, wrong); }, ErrorKind::VariableMismatch);
}

TEST_CASE("invert") {
  CHECK(invert(TruncatedSeries::constant(1, 3, 2.0)).constant_term() == Complex(0.5));
  const auto g = invert(u1(3, 1.0, -1.0));
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(g.coeff(MultiIndex{k}) - 1.0) < 1e-15);
  expect_error([] { invert(TruncatedSeries::variable(1, 3, 0)); }, ErrorKind::ZeroConstantTerm);
}

TEST_CASE("eval") {
  const Complex half[] = {0.5};
  CHECK(eval(u1(2, 1.0, 1.0), half) == Complex(1.5));
  const Complex p[] = {2.0, Complex(0.0, 3.0)};
  CHECK(std::abs(eval(TruncatedSeries::monomial(2, 3, MultiIndex{1, 1}, 1.0), p) - Complex(0.0, 6.0)) < 1e-15);
  CHECK(eval(TruncatedSeries(2, 3), p) == Complex(0.0));
  const Complex one[] = {1.0};
  expect_error([&] { eval(TruncatedSeries(2, 3), one); }, ErrorKind::VariableMismatch);
}

TEST_CASE("ring axioms on random series") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int nv = 1 + trial % 3;
    const int md = 1 + trial % 4;
    const auto a = random_series(rng, nv, md);
    const auto b = random_series(rng, nv, md);
    const auto c = random_series(rng, nv, md);
    CHECK(coeff_equal((a + b) + c, a + (b + c)));
    CHECK(coeff_equal(a + b, b + a));
    CHECK(coeff_equal((a * b) * c, a * (b * c)));
    CHECK(coeff_equal(a * b, b * a));
    CHECK(coeff_equal(a * (b + c), a * b + a * c));
    const auto ab = a * b;
    for (const auto& [k, v] : ab.terms()) CHECK(k.degree() <= md);
  }
}

TEST_CASE("invert is a two-sided inverse") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_series(rng, 2, 4);
    a.set(MultiIndex{0, 0}, 1.0 + random_complex(rng, 0.5));
    const auto one = TruncatedSeries::constant(2, 4, 1.0);
    CHECK(coeff_equal(a * invert(a), one, 1e-10));
    CHECK(coeff_equal(invert(a) * a, one, 1e-10));
  }
}

TEST_CASE("substitution respects composition") {
  std::mt19937_64 rng(13);
  const int md = 4;
  const auto a = random_series(rng, 2, md);
  std::vector<TruncatedSeries> sigma{random_series(rng, 2, md, false), random_series(rng, 2, md, false)};
  std::vector<TruncatedSeries> tau{random_series(rng, 2, md, false), random_series(rng, 2, md, false)};
  std::vector<TruncatedSeries> sigma_tau;
  for (const auto& s : sigma) sigma_tau.push_back(substitute(s, tau));
  CHECK(coeff_equal(substitute(substitute(a, sigma), tau), substitute(a, sigma_tau), 1e-10));
}

TEST_CASE("eval is multiplicative up to the dropped degrees") {
  std::mt19937_64 rng(17);
  const int md = 3;
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_series(rng, 2, md);
    const auto b = random_series(rng, 2, md);
    const std::vector<Complex> p{random_complex(rng, 0.07), random_complex(rng, 0.07)};
    const double r = std::max(std::abs(p[0]), std::abs(p[1]));
    // Dropped terms have degree md+1..2md, each with |coefficient| <= sum |a||b|.
    double total = 0.0;
    for (const auto& [ka, ca] : a.terms())
      for (const auto& [kb, cb] : b.terms())
        if (ka.degree() + kb.degree() > md) total += std::abs(ca) * std::abs(cb) * std::pow(r, ka.degree() + kb.degree());
    CHECK(std::abs(eval(a * b, p) - eval(a, p) * eval(b, p)) <= total + 1e-15);
  }
}

TEST_CASE("series text form round-trips") {
  std::mt19937_64 rng(19);
  const auto a = random_series(rng, 3, 3);
  const auto j = series_to_json(a);
  const auto back = series_from_json(Json::parse(j.dump()));
  CHECK(back.nvars() == 3);
  CHECK(back.maxdeg() == 3);
  CHECK(max_abs_diff(a, back) == 0.0);
  CHECK(j.at("terms").at(0).size() == 3);

  expect_error([] { series_from_json(Json::parse(R"([[[1, 0], 1.0, 0.0]])"), 1, 2); }, ErrorKind::ConfigInvalid);
  expect_error([] { series_from_json(Json::parse(R"([[[3], 1.0, 0.0]])"), 1, 2); }, ErrorKind::ConfigInvalid);
}
