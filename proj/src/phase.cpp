#include "bergman/phase.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bergman {

namespace {

constexpr double kCriticalTolerance = 1e-12;
const Complex kI{0.0, 1.0};

std::vector<int> block_targets(int n, int first_block, int second_block) {
  std::vector<int> t(static_cast<std::size_t>(2 * n));
  for (int j = 0; j < n; ++j) {
    t[static_cast<std::size_t>(j)] = first_block * n + j;
    t[static_cast<std::size_t>(n + j)] = second_block * n + j;
  }
  return t;
}

// Restriction of a 4n-variable series to {x = y, yt = xt}.
TruncatedSeries restrict_to_critical_set(const TruncatedSeries& s, int n) {
  std::vector<TruncatedSeries> subs;
  subs.reserve(static_cast<std::size_t>(4 * n));
  for (int block = 0; block < 4; ++block) {
    const int target_block = block % 2 == 0 ? 0 : 1;  // y,x -> y ; xt,yt -> xt
    for (int j = 0; j < n; ++j) subs.push_back(TruncatedSeries::variable(4 * n, s.maxdeg(), target_block * n + j));
  }
  return substitute(s, subs);
}

Point slow_argument(const Point& base, const Point& y0, const Point& xt0) {
  const std::size_t n = base.size();
  Point arg(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    arg[j] = y0[j] - base[j];
    arg[n + j] = xt0[j] - std::conj(base[j]);
  }
  return arg;
}

double min_singular_value(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().minCoeff();
}

}  // namespace

const char* to_string(ContourKind kind) {
  return kind == ContourKind::Amplitude ? "amplitude_contour" : "inversion_contour";
}

Complex PhaseData::value(const Point& y, const Point& xt, const Point& x, const Point& yt) const {
  const auto& p = polarization;
  return p.value(x, yt) - p.value(x, xt) - p.value(y, yt) + p.value(y, xt);
}

PhaseData build_phase(const Polarization& p) {
  const int n = p.n;
  const int m = p.psi.maxdeg();
  const int nvars4 = 4 * n;
  PhaseData pd;
  pd.n = n;
  pd.polarization = p;

  // Blocks: 0 = y, 1 = xt, 2 = x, 3 = yt.
  pd.phi4 = embed(p.psi, nvars4, block_targets(n, 2, 3));
  pd.phi4 -= embed(p.psi, nvars4, block_targets(n, 2, 1));
  pd.phi4 -= embed(p.psi, nvars4, block_targets(n, 0, 3));
  pd.phi4 += embed(p.psi, nvars4, block_targets(n, 0, 1));

  const double tol = kCriticalTolerance * std::max(1.0, p.psi.sup_norm());
  if (restrict_to_critical_set(pd.phi4, n).sup_norm() > tol) {
    throw Error(ErrorKind::CriticalStructureViolation, "critical value is not zero");
  }
  for (int var = 0; var < nvars4; ++var) {
    const double r = restrict_to_critical_set(diff(pd.phi4, var), n).sup_norm();
    if (r > tol) {
      throw Error(ErrorKind::CriticalStructureViolation,
                  "gradient in variable " + std::to_string(var) + " does not vanish on the critical set: " + std::to_string(r));
    }
  }

  pd.quad_b = SeriesMatrix(n, 2 * n, m - 2);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      MultiIndex alpha(2 * n);
      alpha.set(j, 1);
      alpha.set(n + k, 1);
      pd.quad_b(j, k) = diff(p.psi, alpha);
    }
  }
  Eigen::MatrixXcd b0(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) b0(j, k) = pd.quad_b(j, k).constant_term();
  if (!(min_singular_value(b0) > kDegeneracyThreshold)) {
    throw Error(ErrorKind::DegenerateHessian, "Psi''_{x yt} is singular at the base point");
  }
  auto inv = invert_series_matrix(pd.quad_b);
  pd.b_inverse = std::move(inv.inverse);
  pd.det_b = std::move(inv.determinant);

  Eigen::MatrixXcd hess(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = 0; b < 2 * n; ++b) {
      MultiIndex idx(nvars4);
      idx.set(2 * n + a, 1);
      idx.set(2 * n + b, idx[2 * n + b] + 1);
      hess(a, b) = pd.phi4.coeff(idx) * (a == b ? 2.0 : 1.0);
    }
  }
  pd.hess_det = hess.determinant();
  if (!(std::abs(pd.hess_det) > kDegeneracyThreshold)) {
    throw Error(ErrorKind::DegenerateHessian, "|det phi''| = " + std::to_string(std::abs(pd.hess_det)));
  }

  // Only monomials with at least one x and one yt factor survive the double
  // difference.
  pd.remainder = DisplacementSeries(2 * n, 2 * n);
  for (int k = 3; k <= m; ++k) {
    for (const auto& gamma : multi_indices_of_degree(2 * n, k)) {
      int dx = 0;
      for (int j = 0; j < n; ++j) dx += gamma[j];
      if (dx == 0 || dx == k) continue;
      TruncatedSeries c = scale(diff(p.psi, gamma), 1.0 / gamma.factorial());
      if (!c.empty()) pd.remainder.add_to(gamma, c);
    }
  }
  return pd;
}

std::pair<Point, Point> ContourSpec::amplitude_point(const Point& u) const {
  Point x(static_cast<std::size_t>(n));
  Point yt(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    x[k] = at[k] + u[k];
    Complex btu{};
    for (int i = 0; i < n; ++i) btu += b(i, j) * u[static_cast<std::size_t>(i)];
    yt[k] = at[static_cast<std::size_t>(n) + k] - std::conj(btu);
  }
  return {x, yt};
}

Point ContourSpec::theta(const Point& x, const Point& y) const {
  const auto& d = inversion;
  const auto arg = weight_argument(d.base, y);
  Point th(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Complex s = eval(d.grad[static_cast<std::size_t>(j)], arg);
    for (int k = 0; k < n; ++k) {
      s += 0.5 * eval(d.hess[static_cast<std::size_t>(j * n + k)], arg) * (x[static_cast<std::size_t>(k)] - y[static_cast<std::size_t>(k)]);
    }
    th[static_cast<std::size_t>(j)] = (2.0 / kI) * s;
  }
  return th;
}

Complex ContourSpec::theta_jacobian(const Point& x, const Point& y) const {
  const auto& d = inversion;
  const auto arg = weight_argument(d.base, y);
  Eigen::MatrixXcd jac(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      Complex s = eval(d.mixed[static_cast<std::size_t>(j * n + l)], arg);
      for (int k = 0; k < n; ++k) {
        s += 0.5 * eval(d.hess_mixed[static_cast<std::size_t>((j * n + k) * n + l)], arg) *
             (x[static_cast<std::size_t>(k)] - y[static_cast<std::size_t>(k)]);
      }
      jac(j, l) = (2.0 / kI) * s;
    }
  }
  return jac.determinant();
}

ContourSpec build_good_contour(const PhaseData& pd, const Point& y0, const Point& xt0) {
  const int n = pd.n;
  ContourSpec c;
  c.kind = ContourKind::Amplitude;
  c.n = n;
  c.at = y0;
  c.at.insert(c.at.end(), xt0.begin(), xt0.end());
  const auto arg = slow_argument(pd.polarization.base, y0, xt0);
  const auto vals = pd.quad_b.eval_at(arg);
  c.b = Eigen::MatrixXcd(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) c.b(j, k) = vals[static_cast<std::size_t>(j * n + k)];
  if (!(min_singular_value(c.b) > kDegeneracyThreshold)) {
    throw Error(ErrorKind::DegenerateHessian, "B is singular at the contour base point");
  }
  return c;
}

ContourSpec build_inversion_contour(const Weight& w, const Point& x) {
  const int n = w.n;
  ContourSpec c;
  c.kind = ContourKind::Inversion;
  c.n = n;
  c.at = x;
  auto& d = c.inversion;
  d.base = w.base;
  for (int j = 0; j < n; ++j) d.grad.push_back(diff(w.phi, j));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) d.hess.push_back(diff(d.grad[static_cast<std::size_t>(j)], k));
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) d.mixed.push_back(diff(d.grad[static_cast<std::size_t>(j)], n + l));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) d.hess_mixed.push_back(diff(d.hess[static_cast<std::size_t>(j * n + k)], n + l));
  return c;
}

MarginReport verify_contour(const PhaseData& pd, ContourSpec& c, double radius, int nsamples, std::uint64_t seed) {
  if (c.kind != ContourKind::Amplitude) throw Error(ErrorKind::BadContour, "expected an amplitude contour");
  const int n = pd.n;
  const Point y0(c.at.begin(), c.at.begin() + n);
  const Point xt0(c.at.begin() + n, c.at.end());
  MarginReport rep{c.kind, radius, nsamples, std::numeric_limits<double>::infinity(), {}};
  for (const auto& tuple : sample_ball_tuples(n, 1, radius, nsamples, seed)) {
    const Point& u = tuple[0];
    const auto [x, yt] = c.amplitude_point(u);
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>(j);
      norm2 += std::norm(u[k]) + std::norm(yt[k] - xt0[k]);
    }
    if (norm2 < 1e-24) continue;
    const double ratio = -pd.value(y0, xt0, x, yt).real() / norm2;
    if (ratio < rep.margin) {
      rep.margin = ratio;
      rep.argmin = u;
    }
  }
  if (!(rep.margin > 0.0)) {
    throw Error(ErrorKind::BadContour, "amplitude contour margin " + std::to_string(rep.margin) + " at radius " + std::to_string(radius));
  }
  c.margin = rep.margin;
  return rep;
}

double inversion_exponent(const Weight& w, const ContourSpec& c, const Point& x, const Point& y) {
  const Point th = c.theta(x, y);
  Complex pairing{};
  for (std::size_t j = 0; j < x.size(); ++j) pairing += (x[j] - y[j]) * th[j];
  return -pairing.imag() + w.value(y) - w.value(x);
}

MarginReport verify_contour(const Weight& w, ContourSpec& c, double radius, int nsamples, std::uint64_t seed) {
  if (c.kind != ContourKind::Inversion) throw Error(ErrorKind::BadContour, "expected an inversion contour");
  MarginReport rep{c.kind, radius, nsamples, std::numeric_limits<double>::infinity(), {}};
  for (const auto& tuple : sample_ball_tuples(w.n, 1, radius, nsamples, seed, w.base)) {
    const Point& y = tuple[0];
    const double d2 = squared_distance(c.at, y);
    if (d2 < 1e-24) continue;
    const double ratio = -inversion_exponent(w, c, c.at, y) / d2;
    if (ratio < rep.margin) {
      rep.margin = ratio;
      rep.argmin = y;
    }
  }
  if (!(rep.margin > 0.0)) {
    throw Error(ErrorKind::BadContour, "inversion contour margin " + std::to_string(rep.margin) + " at radius " + std::to_string(radius));
  }
  c.margin = rep.margin;
  return rep;
}

}  // namespace bergman
