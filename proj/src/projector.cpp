#include "bergman/projector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace bergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Below this every error is treated as quadrature / roundoff floor.
constexpr double kFitFloor = 1e-12;

Point displacement(const Point& x, const Point& base) {
  Point d(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) d[j] = base.empty() ? x[j] : x[j] - base[j];
  return d;
}

// Radial Gauss-Legendre nodes on [0, 1] split at the given breakpoints.
GaussRule radial_rule(int total, const std::vector<double>& breakpoints) {
  std::vector<double> edges{0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < 1.0) edges.push_back(b);
  edges.push_back(1.0);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  GaussRule out;
  const std::size_t panels = edges.size() - 1;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = edges[p];
    const double b = edges[p + 1];
    const int m = std::max(16, static_cast<int>(std::lround(total * (b - a))));
    const GaussRule g = gauss_legendre(m);
    for (int i = 0; i < m; ++i) {
      out.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * g.nodes[static_cast<std::size_t>(i)]);
      out.weights.push_back(0.5 * (b - a) * g.weights[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

// Nodes (r e^{i theta}) with weights r dr dtheta on the unit disc.
void unit_disc(int radial, int angular, const std::vector<double>& breakpoints, std::vector<Complex>& z,
               std::vector<double>& w) {
  const GaussRule r = radial_rule(radial, breakpoints);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    for (int k = 0; k < angular; ++k) {
      z.push_back(std::polar(r.nodes[i], kTwoPi * k / angular));
      w.push_back(r.weights[i] * r.nodes[i] * kTwoPi / angular);
    }
  }
}

}  // namespace

const char* to_string(DomainShape shape) {
  switch (shape) {
    case DomainShape::Disc: return "disc";
    case DomainShape::Polydisc: return "polydisc";
    case DomainShape::Ball: return "ball";
  }
  return "disc";
}

DomainShape domain_shape_from_string(const std::string& name) {
  if (name == "disc") return DomainShape::Disc;
  if (name == "polydisc") return DomainShape::Polydisc;
  if (name == "ball") return DomainShape::Ball;
  throw Error(ErrorKind::ConfigInvalid, "unknown domain shape '" + name + "'");
}

GaussRule gauss_legendre(int m) {
  GaussRule g;
  g.nodes.resize(static_cast<std::size_t>(m));
  g.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < (m + 1) / 2; ++i) {
    // Newton from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double wt = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[static_cast<std::size_t>(i)] = -x;
    g.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    g.weights[static_cast<std::size_t>(i)] = wt;
    g.weights[static_cast<std::size_t>(m - 1 - i)] = wt;
  }
  return g;
}

DomainSpec DomainSpec::build(DomainShape shape, int n, const Point& center, double radius, int radial_nodes,
                             int angular_nodes, double h, std::vector<double> breakpoints) {
  if (!(radius > 0.0)) throw Error(ErrorKind::ConfigInvalid, "domain radius must be positive");
  if (radial_nodes < 2 || angular_nodes < 4) throw Error(ErrorKind::ConfigInvalid, "too few quadrature nodes");
  if (static_cast<int>(center.size()) != n) throw Error(ErrorKind::VariableMismatch, "domain center dimension");
  DomainSpec d;
  d.shape = n == 1 && shape == DomainShape::Polydisc ? DomainShape::Disc : shape;
  d.n = n;
  d.center = center;
  d.radius = radius;
  d.radial_nodes = radial_nodes;
  d.angular_nodes = angular_nodes;
  d.breakpoints = std::move(breakpoints);
  d.h = h;

  if (n == 1 || d.shape == DomainShape::Polydisc) {
    std::vector<Complex> z;
    std::vector<double> w;
    unit_disc(radial_nodes, angular_nodes, d.breakpoints, z, w);
    // Tensor product over the n factors.
    const std::size_t m = z.size();
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= m;
    d.nodes.reserve(total);
    d.weights.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      Point p(static_cast<std::size_t>(n));
      double wt = 1.0;
      std::size_t rest = idx;
      for (int j = 0; j < n; ++j) {
        const std::size_t k = rest % m;
        rest /= m;
        p[static_cast<std::size_t>(j)] = center[static_cast<std::size_t>(j)] + radius * z[k];
        wt *= radius * radius * w[k];
      }
      d.nodes.push_back(std::move(p));
      d.weights.push_back(wt);
    }
    return d;
  }
  if (n != 2) throw Error(ErrorKind::ConfigInvalid, "ball quadrature implemented for n <= 2");
  // x1 = r sqrt(1 - s) e^{i t1}, x2 = r sqrt(s) e^{i t2}; dV = r^3 / 2 dr ds dt1 dt2.
  const GaussRule r = radial_rule(radial_nodes, d.breakpoints);
  const GaussRule a = gauss_legendre(std::max(4, radial_nodes / 2));
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double rr = radius * r.nodes[i];
    for (std::size_t l = 0; l < a.nodes.size(); ++l) {
      const double sl = 0.5 * (a.nodes[l] + 1.0);
      const double ws = 0.5 * a.weights[l];
      for (int k1 = 0; k1 < angular_nodes; ++k1) {
        for (int k2 = 0; k2 < angular_nodes; ++k2) {
          Point p{center[0] + std::polar(rr * std::sqrt(1.0 - sl), kTwoPi * k1 / angular_nodes),
                  center[1] + std::polar(rr * std::sqrt(sl), kTwoPi * k2 / angular_nodes)};
          d.nodes.push_back(std::move(p));
          d.weights.push_back(radius * r.weights[i] * 0.5 * rr * rr * rr * ws * (kTwoPi / angular_nodes) *
                              (kTwoPi / angular_nodes));
        }
      }
    }
  }
  return d;
}

DomainSpec DomainSpec::refined() const {
  return build(shape, n, center, radius, 2 * radial_nodes, 2 * angular_nodes, h, breakpoints);
}

DomainSpec DomainSpec::with_h(double new_h) const {
  DomainSpec d = *this;
  d.h = new_h;
  return d;
}

bool DomainSpec::contains(const Point& x) const {
  const double tol = radius * (1.0 + 1e-12);
  if (shape == DomainShape::Polydisc) {
    for (int j = 0; j < n; ++j)
      if (std::abs(x[static_cast<std::size_t>(j)] - center[static_cast<std::size_t>(j)]) > tol) return false;
    return true;
  }
  return std::sqrt(squared_distance(x, center)) <= tol;
}

SplitPolynomial::SplitPolynomial(const TruncatedSeries& s) : n_(s.nvars() / 2) {
  std::map<MultiIndex, std::size_t> slot;
  for (const auto& [k, c] : s.terms()) {
    MultiIndex alpha(n_);
    MultiIndex beta(n_);
    for (int j = 0; j < n_; ++j) {
      alpha.set(j, k[j]);
      beta.set(j, k[n_ + j]);
      maxpow_ = std::max({maxpow_, k[j], k[n_ + j]});
    }
    auto [it, inserted] = slot.try_emplace(beta, outer_.size());
    if (inserted) {
      outer_.push_back(beta);
      inner_.emplace_back();
    }
    inner_[it->second].emplace_back(alpha, c);
  }
}

namespace {

// pw[j * (maxpow + 1) + e] = z_j^e.
std::vector<Complex> power_table(std::span<const Complex> z, int maxpow) {
  const std::size_t stride = static_cast<std::size_t>(maxpow) + 1;
  std::vector<Complex> pw(z.size() * stride);
  for (std::size_t j = 0; j < z.size(); ++j) {
    pw[j * stride] = 1.0;
    for (std::size_t e = 1; e < stride; ++e) pw[j * stride + e] = pw[j * stride + e - 1] * z[j];
  }
  return pw;
}

Complex monomial_value(const MultiIndex& m, const std::vector<Complex>& pw, int maxpow) {
  const std::size_t stride = static_cast<std::size_t>(maxpow) + 1;
  Complex v = 1.0;
  for (int j = 0; j < m.size(); ++j) v *= pw[static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(m[j])];
  return v;
}

}  // namespace

std::vector<Complex> SplitPolynomial::fix(std::span<const Complex> x) const {
  const auto pw = power_table(x, maxpow_);
  // One variable: dense coefficients by power of yt, evaluated by Horner.
  std::vector<Complex> out(n_ == 1 ? static_cast<std::size_t>(maxpow_) + 1 : outer_.size());
  for (std::size_t b = 0; b < outer_.size(); ++b) {
    Complex s{};
    for (const auto& [alpha, c] : inner_[b]) s += c * monomial_value(alpha, pw, maxpow_);
    out[n_ == 1 ? static_cast<std::size_t>(outer_[b][0]) : b] += s;
  }
  return out;
}

Complex SplitPolynomial::eval(const std::vector<Complex>& fixed, std::span<const Complex> yt) const {
  if (n_ == 1) {
    Complex s{};
    for (auto it = fixed.rbegin(); it != fixed.rend(); ++it) s = s * yt[0] + *it;
    return s;
  }
  const auto pw = power_table(yt, maxpow_);
  Complex s{};
  for (std::size_t b = 0; b < outer_.size(); ++b) s += fixed[b] * monomial_value(outer_[b], pw, maxpow_);
  return s;
}

KernelEvaluator::KernelEvaluator(const Polarization& p, TruncatedSeries amplitude, double h, int used_order)
    : n_(p.n),
      h_(h),
      used_order_(used_order),
      base_(p.base),
      amp_(std::move(amplitude)),
      psi_split_(p.psi),
      amp_split_(amp_) {}

KernelEvaluator::Row KernelEvaluator::row(const Point& x) const {
  Row r;
  r.k_ = this;
  const Point d = displacement(x, base_);
  r.psi_ = psi_split_.fix(d);
  r.amp_ = amp_split_.fix(d);
  return r;
}

std::pair<Complex, Complex> KernelEvaluator::Row::at(const Point& y) const {
  std::array<Complex, kMaxVars> buf{};
  for (std::size_t j = 0; j < y.size(); ++j) buf[j] = std::conj(y[j] - k_->base_[j]);
  const std::span<const Complex> yt(buf.data(), y.size());
  return {2.0 * k_->psi_split_.eval(psi_, yt) / k_->h_, k_->amp_split_.eval(amp_, yt)};
}

Complex KernelEvaluator::operator()(const Point& x, const Point& y) const {
  const auto [e, a] = row(x).at(y);
  return std::pow(h_, -n_) * std::exp(e) * a;
}

KernelEvaluator assemble_kernel(const Polarization& p, const Amplitude& a, double h) {
  Realization r = realize(a, h);
  return KernelEvaluator(p, std::move(r.series), h, r.used_order);
}

KernelEvaluator assemble_kernel_fixed(const Polarization& p, const Amplitude& a, double h, int last_order) {
  if (!(h > 0.0)) throw Error(ErrorKind::ConfigInvalid, "h must be positive");
  Realization r = realize_fixed(a, h, last_order);
  return KernelEvaluator(p, std::move(r.series), h, r.used_order);
}

Complex eval_test_function(const TruncatedSeries& u, const Point& base, const Point& x) {
  return eval(u, displacement(x, base));
}

namespace {

struct NodeData {
  std::vector<double> log_weight;  // -2 Phi(y) / h
  std::vector<Complex> uw;         // u(y) * quadrature weight
};

NodeData node_data(const TruncatedSeries& u, const Weight& w, const DomainSpec& dom, double h) {
  NodeData d;
  d.log_weight.reserve(dom.size());
  d.uw.reserve(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) {
    d.log_weight.push_back(-2.0 * w.value(dom.nodes[i]) / h);
    d.uw.push_back(eval_test_function(u, w.base, dom.nodes[i]) * dom.weights[i]);
  }
  return d;
}

// Value and absolute scale of the quadrature sum at one point.
std::pair<Complex, double> project_at(const KernelEvaluator& k, const DomainSpec& dom, const NodeData& nd,
                                      const Point& x) {
  const auto row = k.row(x);
  Complex s{};
  double scale = 0.0;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (nd.uw[i] == 0.0) continue;
    const auto [e, a] = row.at(dom.nodes[i]);
    const Complex term = std::exp(e + nd.log_weight[i]) * a * nd.uw[i];
    s += term;
    scale += std::abs(term);
  }
  const double hn = std::pow(k.h(), -k.n());
  return {hn * s, hn * scale};
}

}  // namespace

std::vector<Complex> apply_projection(const KernelEvaluator& k, const TruncatedSeries& u, const Weight& w,
                                      const DomainSpec& dom, const std::vector<Point>& eval_pts, double tol) {
  if (dom.radius + std::sqrt(squared_distance(dom.center, w.base)) > w.trust_radius * (1.0 + 1e-12)) {
    throw Error(ErrorKind::ConfigInvalid, "integration domain leaves the weight's trust radius");
  }
  const NodeData nd = node_data(u, w, dom, k.h());
  // Points are independent, so the parallel loop is deterministic.
  std::vector<Complex> out(eval_pts.size());
  const auto npts = static_cast<std::ptrdiff_t>(eval_pts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < npts; ++i) out[static_cast<std::size_t>(i)] = project_at(k, dom, nd, eval_pts[static_cast<std::size_t>(i)]).first;

  // Node-doubling check on a few points.
  const std::size_t probes = std::min<std::size_t>(4, eval_pts.size());
  if (probes > 0) {
    const DomainSpec fine = dom.refined();
    const NodeData nf = node_data(u, w, fine, k.h());
    for (std::size_t j = 0; j < probes; ++j) {
      const std::size_t idx = j * eval_pts.size() / probes;
      const auto [v, scale] = project_at(k, fine, nf, eval_pts[idx]);
      if (std::abs(v - out[idx]) > 10.0 * tol * std::max(scale, 1e-300)) {
        throw Error(ErrorKind::QuadratureUnderresolved,
                    "projection changes by " + std::to_string(std::abs(v - out[idx])) + " under node doubling");
      }
    }
  }
  return out;
}

double reproducing_error(const KernelEvaluator& k, const TruncatedSeries& u, const Weight& w, const DomainSpec& U,
                         const DomainSpec& V, double tol) {
  if (!(U.radius < V.radius)) throw Error(ErrorKind::ConfigInvalid, "U must lie strictly inside V");
  const double h = k.h();
  const auto pu = apply_projection(k, u, w, V, U.nodes, tol);
  double num = 0.0;
  for (std::size_t i = 0; i < U.size(); ++i) {
    const Complex diff = pu[i] - eval_test_function(u, w.base, U.nodes[i]);
    num += U.weights[i] * std::norm(diff) * std::exp(-2.0 * w.value(U.nodes[i]) / h);
  }
  double den = 0.0;
  for (std::size_t i = 0; i < V.size(); ++i) {
    den += V.weights[i] * std::norm(eval_test_function(u, w.base, V.nodes[i])) * std::exp(-2.0 * w.value(V.nodes[i]) / h);
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

namespace {

// Ordinary least squares y = c0 + c1 x; returns (c0, c1, r2).
std::array<double, 3> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double c1 = sxy / sxx;
  const double c0 = my - c1 * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (c0 + c1 * x[i]);
    ssr += r * r;
  }
  const double r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return {c0, c1, r2};
}

}  // namespace

DecayFit decay_fit(const std::vector<std::pair<double, double>>& errors, std::size_t min_points) {
  if (errors.size() < std::max<std::size_t>(min_points, 2)) {
    throw Error(ErrorKind::DegenerateFit, "need at least " + std::to_string(min_points) + " grid points");
  }
  std::vector<double> inv_h, log_h, log_err;
  double max_err = 0.0;
  for (const auto& [h, err] : errors) {
    if (!(h > 0.0)) throw Error(ErrorKind::DegenerateFit, "nonpositive h");
    if (!(err > 0.0) || !std::isfinite(err)) throw Error(ErrorKind::DegenerateFit, "nonpositive or nonfinite error");
    max_err = std::max(max_err, err);
    inv_h.push_back(1.0 / h);
    log_h.push_back(std::log(h));
    log_err.push_back(std::log(err));
  }
  if (max_err <= kFitFloor) throw Error(ErrorKind::DegenerateFit, "errors at the numerical floor");
  const auto [lo, hi] = std::minmax_element(inv_h.begin(), inv_h.end());
  if (*hi - *lo <= 0.0) throw Error(ErrorKind::DegenerateFit, "no spread in h");

  DecayFit f;
  const auto lin = linear_fit(inv_h, log_err);
  f.alpha = lin[0];
  f.beta = -lin[1];
  f.r2 = lin[2];
  const auto ll = linear_fit(log_h, log_err);
  f.loglog_slope = ll[1];
  f.loglog_r2 = ll[2];
  return f;
}


OrderSensitivity order_sensitivity(const std::vector<double>& h, const std::vector<double>& err_lower,
                                   const std::vector<double>& err_upper, double power, double factor) {
  if (h.size() != err_lower.size() || h.size() != err_upper.size() || h.size() < 2) {
    throw Error(ErrorKind::DegenerateFit, "order sensitivity needs matching error lists on >= 2 grid points");
  }
  OrderSensitivity out;
  out.h = h;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(err_lower[i] > 0.0) || !(err_upper[i] > 0.0)) {
      throw Error(ErrorKind::DegenerateFit, "order sensitivity needs positive errors");
    }
    out.ratio.push_back(err_upper[i] / err_lower[i]);
  }
  out.pass = true;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    const double p = std::log(out.ratio[i] / out.ratio[i + 1]) / std::log(h[i] / h[i + 1]);
    out.exponent.push_back(p);
    if (!(p >= power / factor && p <= power * factor)) out.pass = false;
  }
  return out;
}

}  // namespace bergman
