#include "bergman/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace bergman {

namespace {

const Complex kI{0.0, 1.0};
// Agreement between the coarse and refined contour quadrature; also the
// resolution below which a next-term comparison is meaningless.
constexpr double kQuadratureFloor = 1e-11;

Point displaced(const Point& x, const Point& base) {
  Point d(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) d[j] = x[j] - base[j];
  return d;
}

Point conj_point(const Point& x) {
  Point c(x.size());
  std::transform(x.begin(), x.end(), c.begin(), [](Complex z) { return std::conj(z); });
  return c;
}

std::vector<MultiIndex> monomial_basis(int n, int degree) {
  std::vector<MultiIndex> basis;
  for (int d = 0; d <= degree; ++d) {
    auto level = multi_indices_of_degree(n, d);
    basis.insert(basis.end(), level.begin(), level.end());
  }
  return basis;
}

Complex monomial(const MultiIndex& m, const Point& z) {
  Complex v = 1.0;
  for (int j = 0; j < m.size(); ++j) v *= std::pow(z[static_cast<std::size_t>(j)], m[j]);
  return v;
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

Eigen::VectorXcd GramKernel::basis_values(const Point& x) const {
  const Point d = displaced(x, base);
  Eigen::VectorXcd e(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t a = 0; a < basis.size(); ++a) e(static_cast<Eigen::Index>(a)) = monomial(basis[a], d);
  return e;
}

Complex GramKernel::operator()(const Point& x, const Point& y) const {
  const Eigen::VectorXcd ex = basis_values(x);
  const Eigen::VectorXcd ey = basis_values(y).conjugate();
  return ex.transpose() * coef * ey;
}

GramKernel gram_bergman(const Weight& w, const DomainSpec& dom, int degree) {
  if (degree < 0) throw Error(ErrorKind::ConfigInvalid, "negative basis degree");
  if (dom.shape != DomainShape::Ball && dom.angular_nodes < 4 * degree) {
    throw Error(ErrorKind::ConfigInvalid, "need >= 4 angular nodes per basis frequency: " +
                                              std::to_string(dom.angular_nodes) + " < 4*" + std::to_string(degree));
  }
  GramKernel g;
  g.n = w.n;
  g.degree = degree;
  g.h = dom.h;
  g.base = w.base;
  g.basis = monomial_basis(w.n, degree);
  const auto m = static_cast<Eigen::Index>(g.basis.size());
  const auto nodes = static_cast<Eigen::Index>(dom.size());

  Eigen::MatrixXcd a(nodes, m);
  for (Eigen::Index i = 0; i < nodes; ++i) {
    const Point& y = dom.nodes[static_cast<std::size_t>(i)];
    const double sw = std::sqrt(dom.weights[static_cast<std::size_t>(i)] * std::exp(-2.0 * w.value(y) / dom.h));
    const Point d = displaced(y, w.base);
    for (Eigen::Index k = 0; k < m; ++k) a(i, k) = sw * monomial(g.basis[static_cast<std::size_t>(k)], d);
  }
  g.gram = a.transpose() * a.conjugate();

  const double asym = (g.gram - g.gram.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * g.gram.cwiseAbs().maxCoeff()) {
    throw Error(ErrorKind::IllConditioned, "Gram matrix not Hermitian: " + std::to_string(asym));
  }
  // Jacobi scaling before the conditioning test and the factorization.
  Eigen::VectorXd s(m);
  for (Eigen::Index k = 0; k < m; ++k) s(k) = 1.0 / std::sqrt(g.gram(k, k).real());
  const Eigen::MatrixXcd scaled = s.asDiagonal() * g.gram * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(scaled, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  g.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(g.condition <= kMaxGramCondition)) {
    throw Error(ErrorKind::IllConditioned, "Gram condition estimate " + std::to_string(g.condition) + " at D = " +
                                               std::to_string(degree));
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(scaled);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::IllConditioned, "Gram matrix not positive definite");
  const Eigen::MatrixXcd inv_scaled = llt.solve(Eigen::MatrixXcd::Identity(m, m));
  g.coef = (s.asDiagonal() * inv_scaled * s.asDiagonal()).transpose();
  return g;
}

GramKernel gram_bergman_capped(const Weight& w, const DomainSpec& dom, int degree) {
  for (int d = degree; d >= 0; --d) {
    try {
      return gram_bergman(w, dom, d);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IllConditioned || d == 0) throw;
    }
  }
  throw Error(ErrorKind::IllConditioned, "no admissible basis degree");
}

double gram_convergence(const Weight& w, const DomainSpec& dom, int degree,
                        const std::vector<std::pair<Point, Point>>& pairs, int step) {
  const GramKernel a = gram_bergman(w, dom, degree);
  const GramKernel b = gram_bergman(w, dom, degree + step);
  double worst = 0.0;
  for (const auto& [x, y] : pairs) {
    const Complex kb = b(x, y);
    worst = std::max(worst, std::abs(a(x, y) - kb) / std::abs(kb));
  }
  return worst;
}

KernelComparison compare_kernels(const KernelFunction& asym, const KernelFunction& exact,
                                 const std::vector<std::pair<Point, Point>>& pairs) {
  KernelComparison c;
  for (const auto& [x, y] : pairs) {
    const Complex e = exact(x, y);
    c.errors.push_back(std::abs(asym(x, y) - e) / std::abs(e));
  }
  if (!c.errors.empty()) c.max = *std::max_element(c.errors.begin(), c.errors.end());
  c.median = median_of(c.errors);
  return c;
}

std::vector<std::pair<Point, Point>> near_diagonal_pairs(int n, const Point& center, double radius, double offset,
                                                         int count, std::uint64_t seed) {
  std::vector<std::pair<Point, Point>> out;
  for (const auto& t : sample_ball_tuples(n, 2, 1.0, count, seed)) {
    Point x(static_cast<std::size_t>(n));
    Point y(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = center[j] + radius * t[0][j];
      y[j] = x[j] + offset * t[1][j];
    }
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

double Cutoff::operator()(const Point& y) const {
  const double t = std::sqrt(squared_distance(y, center)) / radius;
  if (t <= plateau) return 1.0;
  if (t >= support) return 0.0;
  const double s = (t - plateau) / (support - plateau);
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

namespace {

struct InversionSum {
  Complex value;
  double scale = 0.0;
};

InversionSum inversion_sum(const ContourSpec& c, const Weight& w, const TruncatedSeries& u, const Point& x,
                           const DomainSpec& dom, const Cutoff& chi, double h) {
  InversionSum s;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const Point& y = dom.nodes[i];
    const double cy = chi(y);
    if (cy == 0.0) continue;
    const Point th = c.theta(x, y);
    Complex pairing{};
    for (std::size_t j = 0; j < x.size(); ++j) pairing += (x[j] - y[j]) * th[j];
    const Complex term = std::exp(kI * pairing / h) * eval_test_function(u, w.base, y) * cy *
                         c.theta_jacobian(x, y) * dom.weights[i];
    s.value += term;
    s.scale += std::abs(term);
  }
  const double n = static_cast<double>(w.n);
  const Complex pref = std::pow(2.0 * kI, n) / std::pow(2.0 * std::numbers::pi * h, n);
  s.value *= pref;
  s.scale *= std::abs(pref);
  return s;
}

}  // namespace

FourierInversion fourier_inversion_check(const Weight& w, const TruncatedSeries& u, const Point& x,
                                         const DomainSpec& dom, double h, double orientation, double tol) {
  const ContourSpec c = build_inversion_contour(w, x);
  const Cutoff chi{dom.center, dom.radius};
  const InversionSum coarse = inversion_sum(c, w, u, x, dom, chi, h);
  const InversionSum fine = inversion_sum(c, w, u, x, dom.refined(), chi, h);
  if (std::abs(coarse.value - fine.value) > 10.0 * tol * std::max(fine.scale, 1e-300)) {
    throw Error(ErrorKind::QuadratureUnderresolved,
                "inversion integral changes by " + format_sci(std::abs(coarse.value - fine.value) / fine.scale) + " (relative to the absolute integral)");
  }
  FourierInversion r;
  r.value = orientation * fine.value;
  r.residual = std::abs(r.value - eval_test_function(u, w.base, x)) * std::exp(-w.value(x) / h);
  return r;
}

PointwiseBound pointwise_bound_check(const Weight& w, const TruncatedSeries& u, const DomainSpec& V1,
                                     const DomainSpec& V, const std::vector<double>& h_grid) {
  if (!(V1.radius < V.radius)) throw Error(ErrorKind::ConfigInvalid, "V1 must lie strictly inside V");
  PointwiseBound r;
  std::vector<double> phi1, phiv;
  std::vector<double> u1, uv;
  for (const auto& y : V1.nodes) {
    phi1.push_back(w.value(y));
    u1.push_back(std::abs(eval_test_function(u, w.base, y)));
  }
  for (const auto& y : V.nodes) {
    phiv.push_back(w.value(y));
    uv.push_back(std::abs(eval_test_function(u, w.base, y)));
  }
  for (double h : h_grid) {
    double sup = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) sup = std::max(sup, u1[i] * std::exp(-phi1[i] / h));
    double norm2 = 0.0;
    for (std::size_t i = 0; i < uv.size(); ++i) norm2 += V.weights[i] * uv[i] * uv[i] * std::exp(-2.0 * phiv[i] / h);
    const double ratio = norm2 > 0.0 ? sup * std::pow(h, w.n) / std::sqrt(norm2) : 0.0;
    r.h.push_back(h);
    r.ratio.push_back(ratio);
  }
  if (r.ratio.empty()) return r;
  r.max_ratio = *std::max_element(r.ratio.begin(), r.ratio.end());
  const auto largest = std::max_element(r.h.begin(), r.h.end()) - r.h.begin();
  const auto smallest = std::min_element(r.h.begin(), r.h.end()) - r.h.begin();
  r.bounded = std::isfinite(r.max_ratio) &&
              r.ratio[static_cast<std::size_t>(smallest)] <= 2.0 * r.ratio[static_cast<std::size_t>(largest)];
  return r;
}

InequalityReport inequality_suite(const InequalityProbe& probe) {
  const Weight& w = probe.weight;
  const PhaseData& pd = probe.phase;
  const Polarization& p = pd.polarization;
  const int n = w.n;
  if (!(probe.delta > 0.0)) throw Error(ErrorKind::ConfigInvalid, "delta must be positive");
  InequalityReport r;
  r.delta = probe.delta;
  const double inf = std::numeric_limits<double>::infinity();
  r.inversion_margin = inf;
  r.gz_diagonal_margin = inf;
  r.gz_composed_margin = inf;

  const ContourSpec lambda = build_inversion_contour(w, probe.z);
  const auto pairs = sample_ball_tuples(n, 2, probe.radius, probe.nsamples, probe.seed, probe.z);
  const Point zc = conj_point(probe.z);
  for (const auto& t : pairs) {
    const Point& x = t[0];
    const Point& y = t[1];
    const double dxy = squared_distance(x, y);
    if (dxy > 1e-20) {
      r.inversion_margin = std::min(r.inversion_margin, -inversion_exponent(w, lambda, x, y) / dxy - probe.delta);
    }
    const double dx = squared_distance(x, probe.z);
    const double dy = squared_distance(y, probe.z);
    if (dx + dy > 1e-20) {
      const double g = 2.0 * p.value_conj(x, y).real() - w.value(x) - w.value(y) - probe.delta * dx;
      r.gz_diagonal_margin = std::min(r.gz_diagonal_margin, -g / (dx + dy));
    }
  }

  // Composed contour: (y, xt) = (y, conj y), (x, yt) on Gamma(y, conj y).
  const auto composed = sample_ball_tuples(n, 2, probe.radius, probe.nsamples, probe.seed ^ 0xc0c0, {});
  for (const auto& t : composed) {
    Point y(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) y[static_cast<std::size_t>(j)] = probe.z[static_cast<std::size_t>(j)] + t[0][static_cast<std::size_t>(j)];
    const Point xt = conj_point(y);
    const ContourSpec gamma = build_good_contour(pd, y, xt);
    const auto [x, yt] = gamma.amplitude_point(t[1]);
    const double d = squared_distance(x, probe.z) + squared_distance(y, probe.z) + squared_distance(xt, zc) +
                     squared_distance(yt, zc);
    if (d < 1e-20) continue;
    const double g = 2.0 * pd.value(y, xt, x, yt).real() - probe.delta * squared_distance(y, probe.z);
    r.gz_composed_margin = std::min(r.gz_composed_margin, -g / d);
  }

  ContourSpec gamma0 = build_good_contour(pd, probe.z, zc);
  try {
    r.amplitude_margin = verify_contour(pd, gamma0, probe.radius, probe.nsamples, probe.seed ^ 0xa11).margin;
  } catch (const Error&) {
    r.amplitude_margin = -inf;
  }

  const std::pair<const char*, double> checks[] = {{"inversion contour", r.inversion_margin},
                                                   {"diagonal contour for G_z", r.gz_diagonal_margin},
                                                   {"composed contour for G_z", r.gz_composed_margin},
                                                   {"amplitude contour", r.amplitude_margin}};
  for (const auto& [name, m] : checks) {
    if (!(m > 0.0)) throw Error(ErrorKind::BadContour, std::string(name) + " margin " + std::to_string(m));
  }
  return r;
}

namespace {

// phi(y0, xt0; y0 + u, xt0 + v) as a polynomial in (u, v).
TruncatedSeries local_phase(const PhaseData& pd, const Point& y0, const Point& xt0) {
  const int n = pd.n;
  const Point& base = pd.polarization.base;
  std::vector<Complex> slow(static_cast<std::size_t>(2 * n));
  for (int j = 0; j < n; ++j) {
    slow[static_cast<std::size_t>(j)] = y0[static_cast<std::size_t>(j)] - base[static_cast<std::size_t>(j)];
    slow[static_cast<std::size_t>(n + j)] = xt0[static_cast<std::size_t>(j)] - std::conj(base[static_cast<std::size_t>(j)]);
  }
  TruncatedSeries f(2 * n, pd.psi_degree());
  const auto b = pd.quad_b.eval_at(slow);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      MultiIndex m(2 * n);
      m.set(j, 1);
      m.set(n + k, 1);
      f.add_to(m, b[static_cast<std::size_t>(j * n + k)]);
    }
  }
  for (const auto& [fast, c] : pd.remainder.terms()) f.add_to(fast, eval(c, slow));
  return f;
}

}  // namespace

std::vector<SpRow> sp_quadrature_check(const PhaseData& pd, const std::vector<SpCase>& cases,
                                       const std::vector<double>& h_grid, const SpOptions& opt) {
  if (pd.n != 1) throw Error(ErrorKind::ConfigInvalid, "contour quadrature check is implemented for n = 1");
  const Point& base = pd.polarization.base;
  std::vector<SpRow> rows;
  for (const auto& cs : cases) {
    const ContourSpec c = build_good_contour(pd, cs.y0, cs.xt0);
    const Complex bconj = std::conj(c.b(0, 0));
    const TruncatedSeries phase = local_phase(pd, cs.y0, cs.xt0);
    auto fast_point = [&](Complex s) {
      const auto [x, yt] = c.amplitude_point({s});
      return std::vector<Complex>{x[0] - cs.y0[0], yt[0] - cs.xt0[0]};
    };

    // Disc radius where the phase is most negative on the whole boundary circle.
    double rho = opt.max_radius;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 200; ++k) {
      const double r = opt.max_radius * k / 200.0;
      double worst = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < 64; ++a) worst = std::max(worst, eval(phase, fast_point(std::polar(r, 2.0 * std::numbers::pi * a / 64))).real());
      if (worst < best) {
        best = worst;
        rho = r;
      }
    }

    const int hmax = cs.order + 1;
    int udeg = 0;
    for (const auto& [k, v] : cs.u.terms()) udeg = std::max(udeg, k.degree());
    const TruncatedSeries u = cs.u.padded(std::max(cs.u.maxdeg(), 2 * hmax + 2));
    const HGradedSeries formal = formal_expansion(pd, HGradedSeries({u}), hmax);
    const std::vector<Complex> slow{cs.y0[0] - base[0], cs.xt0[0] - std::conj(base[0])};
    std::vector<Complex> terms;
    for (int m = 0; m <= hmax; ++m) terms.push_back(eval(formal[m], slow));
    const bool terminating = pd.remainder.empty() && udeg < 2 * hmax;

    for (double h : h_grid) {
      std::vector<double> bps;
      for (double f : {1.0, 2.0, 4.0, 8.0}) {
        const double t = f * std::sqrt(h) / rho;
        if (t < 1.0) bps.push_back(t);
      }
      auto integrate = [&](int radial, int angular) {
        const DomainSpec d = DomainSpec::build(DomainShape::Disc, 1, {0.0}, rho, radial, angular, h, bps);
        Complex s{};
        double scale = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
          const auto f = fast_point(d.nodes[i][0]);
          const std::vector<Complex> at{slow[0] + f[0], slow[1] + f[1]};
          const Complex term = std::exp(2.0 * eval(phase, f) / h) * eval(u, at) * d.weights[i];
          s += term;
          scale += std::abs(term);
        }
        return std::pair{s * bconj / h, scale * std::abs(bconj) / h};
      };
      const auto [coarse, scale] = integrate(opt.radial_nodes, opt.angular_nodes);
      const auto [fine, fscale] = integrate(2 * opt.radial_nodes, 2 * opt.angular_nodes);
      if (std::abs(coarse - fine) > kQuadratureFloor * std::max(fscale, 1.0)) {
        throw Error(ErrorKind::QuadratureUnderresolved,
                    cs.label + ": contour quadrature changes by " + std::to_string(std::abs(coarse - fine)));
      }
      SpRow row;
      row.label = cs.label;
      row.h = h;
      row.quadrature = fine;
      double hk = 1.0;
      for (int m = 0; m <= cs.order; ++m) {
        row.partial += hk * terms[static_cast<std::size_t>(m)];
        hk *= h;
      }
      row.next_term = hk * terms[static_cast<std::size_t>(hmax)];
      row.error = std::abs(row.quadrature - row.partial);
      row.terminating = terminating;
      row.pass = terminating ? row.error <= opt.terminating_tol * std::max(1.0, std::abs(row.quadrature))
                             : row.error <= opt.next_term_factor * std::abs(row.next_term) +
                                                kQuadratureFloor * std::max(1.0, std::abs(row.quadrature));
      rows.push_back(row);
    }
  }
  return rows;
}

Complex LocalizedElement::operator()(const Point& x) const {
  const Point th = contour.theta(x, z);
  Complex pairing{};
  for (std::size_t j = 0; j < x.size(); ++j) pairing += (x[j] - z[j]) * th[j];
  const double n = static_cast<double>(z.size());
  return std::exp(kI * pairing / h) * vz_factor * contour.theta_jacobian(x, z) / std::pow(2.0 * std::numbers::pi * h, n);
}

LocalizedElement localized_element(const TruncatedSeries& v, const Point& z, const Weight& w, double h,
                                   const Cutoff& chi, double delta, double radius, int nsamples, std::uint64_t seed) {
  LocalizedElement e;
  e.z = z;
  e.h = h;
  e.vz_factor = eval_test_function(v, w.base, z) * chi(z);
  e.contour = build_inversion_contour(w, z);
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& t : sample_ball_tuples(w.n, 1, radius, nsamples, seed, z)) {
    const Point& x = t[0];
    const double d2 = squared_distance(x, z);
    if (d2 < 1e-20) continue;
    // F_z(x) = -Im((x - z) theta(x, z)) + Phi(z) against Phi(x) - delta |x - z|^2.
    const Point th = e.contour.theta(x, z);
    Complex pairing{};
    for (std::size_t j = 0; j < x.size(); ++j) pairing += (x[j] - z[j]) * th[j];
    const double fz = -pairing.imag() + w.value(z);
    margin = std::min(margin, (w.value(x) - fz) / d2 - delta);
  }
  e.margin = margin;
  if (!(margin > 0.0)) throw Error(ErrorKind::BadContour, "localized element domination margin " + std::to_string(margin));
  return e;
}

}  // namespace bergman
