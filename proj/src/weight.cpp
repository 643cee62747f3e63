#include "bergman/weight.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bergman {

namespace {

// Exponent of the conjugate monomial: swap the x and conj(x) halves.
MultiIndex conjugate_index(const MultiIndex& k, int n) {
  MultiIndex m(2 * n);
  for (int j = 0; j < n; ++j) {
    m.set(j, k[n + j]);
    m.set(n + j, k[j]);
  }
  return m;
}

Eigen::MatrixXcd mixed_hessian_at_origin(const TruncatedSeries& s, int n) {
  Eigen::MatrixXcd h(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      MultiIndex m(2 * n);
      m.set(j, 1);
      m.set(n + k, m[n + k] + 1);
      h(j, k) = s.coeff(m);
    }
  }
  return h;
}

}  // namespace

std::vector<Complex> weight_argument(const Point& base, const Point& x) {
  const std::size_t n = x.size();
  std::vector<Complex> arg(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex d = base.empty() ? x[j] : x[j] - base[j];
    arg[j] = d;
    arg[n + j] = std::conj(d);
  }
  return arg;
}

double Weight::value(const Point& x) const { return eval(phi, weight_argument(base, x)).real(); }

Complex Polarization::value(const Point& x, const Point& ytilde) const {
  std::vector<Complex> arg(2 * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    arg[k] = x[k] - base[k];
    arg[k + static_cast<std::size_t>(n)] = ytilde[k] - std::conj(base[k]);
  }
  return eval(psi, arg);
}

Complex Polarization::value_conj(const Point& x, const Point& y) const {
  Point yc(y.size());
  std::transform(y.begin(), y.end(), yc.begin(), [](Complex c) { return std::conj(c); });
  return value(x, yc);
}

Weight validate_weight(const TruncatedSeries& raw, const Point& base, double trust_radius) {
  if (raw.nvars() % 2 != 0 || raw.nvars() == 0) {
    throw Error(ErrorKind::VariableMismatch, "weight needs an even number of variables, got " + std::to_string(raw.nvars()));
  }
  const int n = raw.nvars() / 2;
  if (static_cast<int>(base.size()) != n) throw Error(ErrorKind::VariableMismatch, "base point dimension");

  // Hermitian symmetry c(beta, alpha) = conj c(alpha, beta); average when close.
  TruncatedSeries phi(raw.nvars(), raw.maxdeg());
  for (const auto& [k, c] : raw.terms()) {
    const Complex partner = std::conj(raw.coeff(conjugate_index(k, n)));
    if (std::abs(c - partner) > kHermitianTolerance) {
      throw Error(ErrorKind::NotRealValued, "coefficient asymmetry " + std::to_string(std::abs(c - partner)));
    }
    phi.set(k, 0.5 * (c + partner));
  }
  for (const auto& [k, c] : raw.terms()) {
    const MultiIndex partner = conjugate_index(k, n);
    if (phi.coeff(partner) == Complex{}) phi.set(partner, std::conj(phi.coeff(k)));
  }

  Eigen::MatrixXcd levi = mixed_hessian_at_origin(phi, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(levi);
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmin > kDegeneracyThreshold)) {
    throw Error(ErrorKind::Degenerate, "smallest Levi eigenvalue " + std::to_string(lmin));
  }
  Weight w;
  w.n = n;
  w.base = base;
  w.phi = std::move(phi);
  w.levi_min = lmin;
  w.trust_radius = trust_radius;
  return w;
}

Polarization polarize(const Weight& w) {
  Polarization p;
  p.n = w.n;
  p.base = w.base;
  // conj(x)^beta -> ytilde^beta is a relabeling of the same storage.
  p.psi = w.phi;
  p.b_matrix = mixed_hessian_at_origin(p.psi, w.n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p.b_matrix);
  if (!(svd.singularValues().minCoeff() > kDegeneracyThreshold)) {
    throw Error(ErrorKind::Degenerate, "mixed Hessian of the polarization is singular");
  }
  return p;
}

GapEstimate quadratic_gap_estimate(const Weight& w, const Polarization& p, double radius, int nsamples,
                                   std::uint64_t seed) {
  const auto pairs = sample_ball_tuples(w.n, 2, radius, nsamples, seed, w.base);
  GapEstimate g{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& pr : pairs) {
    const double d2 = squared_distance(pr[0], pr[1]);
    if (d2 < 1e-20) continue;
    const double num = w.value(pr[0]) + w.value(pr[1]) - 2.0 * p.value_conj(pr[0], pr[1]).real();
    const double ratio = num / d2;
    g.cmin = std::min(g.cmin, ratio);
    g.cmax = std::max(g.cmax, ratio);
  }
  if (!(g.cmin > 0.0)) {
    throw Error(ErrorKind::GapViolation, "quadratic gap ratio " + std::to_string(g.cmin) + " at radius " + std::to_string(radius));
  }
  return g;
}

Eigen::MatrixXcd levi_form(const Weight& w, const Point& point) {
  const int n = w.n;
  const auto arg = weight_argument(w.base, point);
  Eigen::MatrixXcd h(n, n);
  for (int j = 0; j < n; ++j) {
    const TruncatedSeries dj = diff(w.phi, j);
    for (int k = 0; k < n; ++k) h(j, k) = eval(diff(dj, n + k), arg);
  }
  return h;
}

TruncatedSeries add_pluriharmonic(const TruncatedSeries& phi, const TruncatedSeries& g) {
  const int n = phi.nvars() / 2;
  if (g.nvars() != n) throw Error(ErrorKind::VariableMismatch, "pluriharmonic term must be holomorphic in n variables");
  std::vector<int> to_x(static_cast<std::size_t>(n));
  std::vector<int> to_xbar(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    to_x[static_cast<std::size_t>(j)] = j;
    to_xbar[static_cast<std::size_t>(j)] = n + j;
  }
  // Re g = (g(x) + conj(g)(conj x)) / 2.
  TruncatedSeries re_g = scale(embed(g, 2 * n, to_x), 0.5);
  re_g += scale(embed(conj_coeffs(g), 2 * n, to_xbar), 0.5);
  return add(phi, re_g.truncated(phi.maxdeg()));
}

}  // namespace bergman
