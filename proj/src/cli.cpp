#include "bergman/cli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "bergman/oracle.hpp"

namespace bergman {

namespace {

const std::vector<std::string> kSuites{"validate", "amplitude", "kernel", "verify"};

// Tolerances of the pass/fail flags in the report.
constexpr double kMarginFloor = 1e-3;
constexpr double kResidualTol = 1e-10;
constexpr double kClosedFormTol = 1e-10;
constexpr double kFitR2 = 0.9;

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

const Json& section(const Json& j, const char* key) {
  static const Json empty = Json::object();
  if (j.contains(key)) {
    if (!j.at(key).is_object()) throw Error(ErrorKind::ConfigInvalid, std::string("\"") + key + "\" must be an object");
    return j.at(key);
  }
  return empty;
}

double sum_abs(const TruncatedSeries& s) {
  double t = 0.0;
  for (const auto& [k, c] : s.terms()) t += std::abs(c);
  return t;
}

bool purely_quadratic(const TruncatedSeries& phi) {
  for (const auto& [k, c] : phi.terms()) {
    if (k.degree() != 2 && std::abs(c) > 0.0) return false;
  }
  return true;
}

Json vec_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json error_json(const std::exception& e) {
  Json j{{"status", "error"}, {"error", e.what()}};
  if (const auto* be = dynamic_cast<const Error*>(&e)) j["kind"] = std::string(to_string(be->kind()));
  return j;
}

std::string status_of(bool ok) { return ok ? "pass" : "fail"; }

// Sorted by decreasing h so that "monotone" reads along the grid.
std::vector<double> sorted_grid(std::vector<double> g) {
  std::sort(g.begin(), g.end(), std::greater<>());
  return g;
}

struct FitResult {
  Json json;
  bool pass = false;
  bool exact = false;
};

// Errors at or below this are rounding noise and are left out of fits.
constexpr double kErrorFloor = 1e-12;

FitResult fit_json(const std::vector<std::pair<double, double>>& errs) {
  FitResult r;
  std::vector<std::pair<double, double>> above;
  double worst = 0.0;
  for (const auto& e : errs) {
    worst = std::max(worst, e.second);
    if (e.second > kErrorFloor) above.push_back(e);
  }
  if (worst <= kErrorFloor) {
    // At the rounding floor on the whole grid: nothing left to decay.
    r.exact = r.pass = true;
    r.json = {{"status", "exact"}, {"max_error", number(worst)}};
    return r;
  }
  if (above.size() < 3) {
    // Reaches the floor within the grid; too few points to fit, but decaying.
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) decreasing = decreasing && errs[i + 1].second <= errs[i].second;
    r.pass = decreasing;
    r.json = {{"status", decreasing ? "floor" : "fail"}, {"max_error", number(worst)}, {"points", above.size()}};
    return r;
  }
  try {
    const DecayFit f = decay_fit(above);
    r.pass = f.beta > 0.0 && f.r2 >= kFitR2;
    r.json = {{"beta", number(f.beta)},          {"alpha", number(f.alpha)},
              {"r2", number(f.r2)},              {"loglog_r2", number(f.loglog_r2)},
              {"loglog_slope", number(f.loglog_slope)}, {"status", status_of(r.pass)}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateFit) throw;
    r.json = {{"status", "fail"}, {"error", e.what()}, {"max_error", number(worst)}};
  }
  r.json["points"] = above.size();
  r.json["floor_points"] = errs.size() - above.size();
  return r;
}

struct Pipeline {
  Weight w;
  Polarization p;
  PhaseData pd;
};

Pipeline build_pipeline(const RunConfig& c) {
  Pipeline pl;
  pl.w = validate_weight(c.phi, c.base, c.trust_radius);
  pl.p = polarize(pl.w);
  pl.pd = build_phase(pl.p);
  return pl;
}

DomainSpec v_domain(const RunConfig& c, double h) {
  return DomainSpec::build(c.shape, c.n, c.base, c.v_radius, c.radial_nodes, c.angular_nodes, h);
}

DomainSpec u_domain(const RunConfig& c, double h) {
  return DomainSpec::build(c.shape, c.n, c.base, c.u_radius, c.u_radial_nodes, c.u_angular_nodes, h);
}

// ---------------------------------------------------------------- validate

Json validate_suite(const RunConfig& c, const Pipeline& pl, double& cmin_out) {
  const double r = c.effective_margin_radius();
  Json out;
  out["weight"] = {{"n", pl.w.n},
                   {"base", point_to_json(pl.w.base)},
                   {"trust_radius", number(pl.w.trust_radius)},
                   {"available_degree", pl.w.available_degree()},
                   {"levi_min", number(pl.w.levi_min)}};

  // Psi(x, conj x) must reproduce Phi.
  double reality = 0.0;
  for (const auto& t : sample_ball_tuples(c.n, 1, r, 256, c.seed + 11, c.base)) {
    reality = std::max(reality, std::abs(pl.p.value_conj(t[0], t[0]) - pl.w.value(t[0])));
  }
  out["polarization"] = {{"checksum", number(sum_abs(pl.p.psi))},
                         {"terms", pl.p.psi.terms().size()},
                         {"diagonal_residual", number(reality)}};

  const GapEstimate gap = quadratic_gap_estimate(pl.w, pl.p, r, c.samples, c.seed + 12);
  cmin_out = gap.cmin;
  out["gap"] = {{"cmin", number(gap.cmin)}, {"cmax", number(gap.cmax)}, {"radius", number(r)}};

  const Point xt0 = [&] {
    Point q;
    for (const auto& z : c.base) q.push_back(std::conj(z));
    return q;
  }();
  out["phase"] = {{"hess_det", complex_to_json(pl.pd.hess_det)},
                  {"det_b", complex_to_json(pl.pd.det_b.constant_term())},
                  {"psi_degree", pl.pd.psi_degree()}};

  ContourSpec amp = build_good_contour(pl.pd, c.base, xt0);
  const MarginReport ma = verify_contour(pl.pd, amp, r, c.samples, c.seed + 13);
  ContourSpec inv = build_inversion_contour(pl.w, c.base);
  const MarginReport mi = verify_contour(pl.w, inv, r, c.samples, c.seed + 14);
  const bool margins_ok = ma.margin >= kMarginFloor && mi.margin >= kMarginFloor;
  out["margins"] = {{"amplitude_contour", number(ma.margin)},
                    {"inversion_contour", number(mi.margin)},
                    {"radius", number(r)},
                    {"samples", c.samples},
                    {"status", status_of(margins_ok)}};

  const bool ok = reality <= 1e-10 && margins_ok;
  out["status"] = status_of(ok);
  return out;
}

// --------------------------------------------------------------- amplitude

Json amplitude_suite(const RunConfig& c, const Pipeline& pl, Amplitude& a) {
  Json out;
  a = solve_amplitude(pl.pd, c.order);
  const double r = c.effective_growth_radius();
  estimate_growth(a, r);

  Json coeffs = Json::array();
  Json sups = Json::array();
  for (const auto& s : a.coeffs) {
    coeffs.push_back(series_to_json(s));
    sups.push_back(number(s.sup_norm()));
  }
  out["order"] = a.order;
  out["c0"] = series_to_json(a.c0);
  out["a0_at_base"] = complex_to_json(a.coeffs.front().constant_term());
  out["coefficients"] = coeffs;
  out["coefficient_max_abs"] = sups;

  const auto seq = normalized_growth(a, r);
  const GrowthBand band = growth_band(seq, 2.0);
  // Soft check: recorded, never fatal.
  out["growth"] = {{"C", number(a.growth_C)},
                   {"radius", number(r)},
                   {"normalized", vec_json(seq)},
                   {"band", {{"median", number(band.median)}, {"lo", number(band.lo)}, {"hi", number(band.hi)}}},
                   {"status", band.within ? "pass" : "warn"}};

  Json cut = Json::array();
  for (double h : sorted_grid(c.h_grid)) {
    const Realization re = realize(a, h);
    cut.push_back({{"h", number(h)},
                   {"used_order", re.used_order},
                   {"bound", number(a.growth_C > 0.0 ? 1.0 / (a.growth_C * std::numbers::e * h) : INFINITY)}});
  }
  out["realization"] = cut;

  const HGradedSeries aa = formal_expansion(pl.pd, a.as_graded(), c.order);
  Json res = Json::array();
  double worst = std::abs(aa[0].constant_term() - 1.0);
  for (const auto& [k, v] : aa[0].terms()) {
    if (k.degree() > 0) worst = std::max(worst, std::abs(v));
  }
  res.push_back(number(worst));
  for (int k = 1; k <= aa.hmax(); ++k) {
    res.push_back(number(aa[k].sup_norm()));
    worst = std::max(worst, aa[k].sup_norm());
  }
  out["defining_equation"] = {{"residual_by_order", res}, {"max", number(worst)}, {"status", status_of(worst < kResidualTol)}};
  bool ok = worst < kResidualTol;

  if (purely_quadratic(pl.w.phi)) {
    // a = (2/pi)^n det(Levi form), nothing at higher orders.
    const Complex det = levi_form(pl.w, c.base).determinant();
    const double expected = std::pow(2.0 / std::numbers::pi, c.n) * det.real();
    double higher = 0.0;
    for (std::size_t k = 1; k < a.coeffs.size(); ++k) higher = std::max(higher, a.coeffs[k].sup_norm());
    const double dev = std::abs(a.coeffs.front().constant_term() - expected);
    const bool exact = dev <= 1e-12 && higher < kResidualTol;
    out["closed_form"] = {{"expected_a0", number(expected)},
                          {"a0_error", number(dev)},
                          {"higher_max", number(higher)},
                          {"status", status_of(exact)}};
    ok = ok && exact;
  }
  out["status"] = status_of(ok);
  return out;
}

// ------------------------------------------------------------------ kernel

Json kernel_suite(const RunConfig& c, const Pipeline& pl, const Amplitude& a) {
  const auto grid = sorted_grid(c.h_grid);
  const auto orders = c.effective_kernel_orders();
  const auto tests = c.effective_test_functions();
  const auto pairs = near_diagonal_pairs(c.n, c.base, c.effective_pair_radius(), c.pair_offset, c.pairs, c.seed + 21);
  const bool quadratic = purely_quadratic(pl.w.phi);
  const double levi_det = levi_form(pl.w, c.base).determinant().real();

  Json table = Json::array();
  std::vector<std::pair<double, double>> realized_errs;
  std::map<int, std::vector<double>> order_errs;
  std::map<int, std::vector<std::pair<double, double>>> rep_errs;
  double closed_worst = 0.0;

  for (double h : grid) {
    Json row;
    row["h"] = number(h);
    const DomainSpec V = v_domain(c, h);
    const DomainSpec U = u_domain(c, h);
    const GramKernel g = gram_bergman_capped(pl.w, V, c.gram_degree);
    const int step = 5;
    const double conv = g.degree > step ? gram_convergence(pl.w, V, g.degree - step, pairs, step) : NAN;
    row["gram"] = {{"degree", g.degree}, {"condition", number(g.condition)}, {"convergence", number(conv)}};
    const KernelFunction exact = [&](const Point& x, const Point& y) { return g(x, y); };

    const KernelEvaluator kr = assemble_kernel(pl.p, a, h);
    const KernelComparison cr = compare_kernels([&](const Point& x, const Point& y) { return kr(x, y); }, exact, pairs);
    row["realized"] = {{"used_order", kr.used_order()}, {"max", number(cr.max)}, {"median", number(cr.median)}};
    realized_errs.emplace_back(h, cr.max);

    if (quadratic) {
      // (2/pi)^n det(Levi) h^-n e^{2 Psi(x, conj y)/h}
      double worst = 0.0;
      for (const auto& [x, y] : pairs) {
        const Complex want = std::pow(2.0 / std::numbers::pi, c.n) * levi_det * std::pow(h, -c.n) *
                             std::exp(2.0 * pl.p.value_conj(x, y) / h);
        worst = std::max(worst, std::abs(kr(x, y) - want) / std::abs(want));
      }
      row["closed_form_max"] = number(worst);
      closed_worst = std::max(closed_worst, worst);
    }

    Json per = Json::array();
    for (int N : orders) {
      const KernelEvaluator k = assemble_kernel_fixed(pl.p, a, h, N);
      const KernelComparison cmp = compare_kernels([&](const Point& x, const Point& y) { return k(x, y); }, exact, pairs);
      order_errs[N].push_back(cmp.max);
      double err_u = 0.0;
      for (const auto& u : tests) err_u = std::max(err_u, reproducing_error(k, u, pl.w, U, V));
      rep_errs[N].emplace_back(h, err_u);
      per.push_back({{"N", N}, {"max", number(cmp.max)}, {"median", number(cmp.median)}, {"err_U", number(err_u)}});
    }
    row["orders"] = per;
    table.push_back(row);
  }

  Json out;
  out["pairs"] = c.pairs;
  out["pair_radius"] = number(c.effective_pair_radius());
  out["table"] = table;

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < realized_errs.size(); ++i) {
    if (realized_errs[i].second <= kErrorFloor) break;
    if (!(realized_errs[i + 1].second < realized_errs[i].second)) monotone = false;
  }
  const FitResult fit = fit_json(realized_errs);
  out["monotone"] = monotone;
  out["decay_fit"] = fit.json;
  bool ok = fit.pass && (monotone || fit.exact);

  // beta_running: decay fit over the grid up to and including each h.
  Json running = Json::object();
  for (const auto& [N, errs] : rep_errs) {
    Json col = Json::array();
    for (std::size_t i = 0; i < errs.size(); ++i) {
      if (i + 1 < 3) {
        col.push_back(nullptr);
        continue;
      }
      try {
        col.push_back(number(decay_fit({errs.begin(), errs.begin() + static_cast<std::ptrdiff_t>(i) + 1}).beta));
      } catch (const Error&) {
        col.push_back(nullptr);
      }
    }
    running[std::to_string(N)] = col;
  }
  out["beta_running"] = running;

  Json sens = Json::array();
  for (std::size_t i = 0; i + 1 < orders.size(); ++i) {
    const int lo = orders[i];
    const int hi = orders[i + 1];
    Json entry{{"lower", lo}, {"upper", hi}};
    if (hi != lo + 1) {
      entry["status"] = "skipped";
      entry["reason"] = "orders are not adjacent";
    } else if (a.coeffs[static_cast<std::size_t>(hi)].sup_norm() < 1e-12) {
      entry["status"] = "not applicable";
      entry["reason"] = "amplitude term of order " + std::to_string(hi) + " vanishes";
    } else {
      try {
        const OrderSensitivity s = order_sensitivity(grid, order_errs[lo], order_errs[hi], 1.0, 3.0);
        entry["ratio"] = vec_json(s.ratio);
        entry["exponent"] = vec_json(s.exponent);
        entry["status"] = status_of(s.pass);
        ok = ok && s.pass;
      } catch (const Error& e) {
        entry["status"] = "fail";
        entry["error"] = e.what();
        ok = false;
      }
    }
    sens.push_back(entry);
  }
  out["order_sensitivity"] = sens;

  if (quadratic) {
    out["closed_form"] = {{"max", number(closed_worst)}, {"status", status_of(closed_worst <= kClosedFormTol)}};
    ok = ok && closed_worst <= kClosedFormTol;
  }
  out["status"] = status_of(ok);
  return out;
}

// ------------------------------------------------------------------ verify

std::vector<SpCase> default_sp_cases(const Pipeline& pl, const RunConfig& c) {
  const int m = pl.pd.psi_degree();
  const auto mono = [&](int p, int q) { return TruncatedSeries::monomial(2, m, MultiIndex{p, q}, 1.0); };
  const Complex z0 = c.base[0];
  const Complex off(0.1, 0.05);
  return {
      {"1", mono(0, 0), {z0}, {std::conj(z0)}, 4},
      {"x yt", mono(1, 1), {z0}, {std::conj(z0)}, 4},
      {"x^2 yt^2", mono(2, 2), {z0}, {std::conj(z0)}, 4},
      {"1 off-diagonal", mono(0, 0), {z0 + off}, {std::conj(z0 + off)}, 4},
      {"x off-diagonal", mono(1, 0), {z0 + 0.1}, {std::conj(z0) + 0.05}, 4},
  };
}

Json verify_suite(const RunConfig& c, const Pipeline& pl, double cmin) {
  Json out;
  bool ok = true;
  const auto grid = sorted_grid(c.h_grid);
  const auto tests = c.effective_test_functions();
  const double r = c.effective_margin_radius();

  // Fourier inversion at the base point.
  Json fourier = Json::array();
  for (std::size_t t = 0; t < tests.size(); ++t) {
    Json e{{"u", series_to_json(tests[t])}};
    try {
      std::vector<std::pair<double, double>> errs;
      Json res = Json::array();
      for (double h : grid) {
        const DomainSpec dom = DomainSpec::build(c.shape, c.n, c.base, c.v_radius, std::max(96, c.radial_nodes),
                                                 c.angular_nodes, h, {0.6, 0.9});
        const FourierInversion fi = fourier_inversion_check(pl.w, tests[t], c.base, dom, h);
        errs.emplace_back(h, fi.residual);
        res.push_back(number(fi.residual));
      }
      const FitResult f = fit_json(errs);
      e["residual"] = res;
      e["fit"] = f.json;
      e["status"] = f.exact ? "exact" : status_of(f.pass);
      ok = ok && f.pass;
    } catch (const Error& err) {
      e.update(error_json(err));
      ok = false;
    }
    fourier.push_back(e);
  }
  out["fourier"] = fourier;

  Json pointwise = Json::array();
  for (const auto& u : tests) {
    const double h0 = grid.front();
    const PointwiseBound pb = pointwise_bound_check(pl.w, u, u_domain(c, h0), v_domain(c, h0), grid);
    pointwise.push_back({{"u", series_to_json(u)},
                         {"ratio", vec_json(pb.ratio)},
                         {"max_ratio", number(pb.max_ratio)},
                         {"status", status_of(pb.bounded)}});
    ok = ok && pb.bounded;
  }
  out["pointwise"] = pointwise;

  const double delta = c.delta.value_or(0.5 * cmin);
  try {
    InequalityProbe probe{pl.w, pl.pd, delta, c.base, r, c.samples, c.seed + 31};
    const InequalityReport ir = inequality_suite(probe);
    const bool pass = std::min({ir.inversion_margin, ir.gz_diagonal_margin, ir.gz_composed_margin, ir.amplitude_margin}) >=
                      kMarginFloor;
    out["inequalities"] = {{"delta", number(ir.delta)},
                           {"inversion", number(ir.inversion_margin)},
                           {"gz_diagonal", number(ir.gz_diagonal_margin)},
                           {"gz_composed", number(ir.gz_composed_margin)},
                           {"amplitude", number(ir.amplitude_margin)},
                           {"radius", number(r)},
                           {"samples", c.samples},
                           {"status", status_of(pass)}};
    ok = ok && pass;
  } catch (const Error& err) {
    out["inequalities"] = error_json(err);
    ok = false;
  }

  if (c.n == 1) {
    try {
      const auto rows = sp_quadrature_check(pl.pd, default_sp_cases(pl, c), grid);
      Json tab = Json::array();
      bool all = true;
      for (const auto& row : rows) {
        tab.push_back({{"case", row.label},
                       {"h", number(row.h)},
                       {"quadrature", complex_to_json(row.quadrature)},
                       {"partial", complex_to_json(row.partial)},
                       {"next_term", number(std::abs(row.next_term))},
                       {"error", number(row.error)},
                       {"terminating", row.terminating},
                       {"pass", row.pass}});
        all = all && row.pass;
      }
      out["stationary_phase"] = {{"rows", tab}, {"status", status_of(all)}};
      ok = ok && all;
    } catch (const Error& err) {
      out["stationary_phase"] = error_json(err);
      ok = false;
    }
  } else {
    out["stationary_phase"] = {{"status", "skipped"}, {"reason", "contour quadrature is implemented for n = 1"}};
  }

  try {
    const double h = grid[grid.size() / 2];
    const Cutoff chi{c.base, c.v_radius};
    const LocalizedElement le = localized_element(TruncatedSeries::constant(c.n, 0, 1.0), c.base, pl.w, h, chi,
                                                  delta, r, 4096, c.seed + 41);
    out["localized_element"] = {{"h", number(h)}, {"margin", number(le.margin)}, {"value_at_z", complex_to_json(le(c.base))},
                                {"status", "pass"}};
  } catch (const Error& err) {
    out["localized_element"] = error_json(err);
    ok = false;
  }

  out["status"] = status_of(ok);
  return out;
}

std::vector<double> parse_grid(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::ConfigInvalid, "h_grid must be a non-empty list");
  std::vector<double> g;
  for (const auto& v : j) g.push_back(v.get<double>());
  return g;
}

}  // namespace

std::vector<int> RunConfig::effective_kernel_orders() const {
  if (!kernel_orders.empty()) return kernel_orders;
  return {order};
}

std::vector<TruncatedSeries> RunConfig::effective_test_functions() const {
  if (!test_functions.empty()) return test_functions;
  std::vector<TruncatedSeries> out;
  for (int d = 0; d <= 3; ++d) {
    MultiIndex m(n);
    m.set(0, d);
    out.push_back(TruncatedSeries::monomial(n, 8, m, 1.0));
  }
  return out;
}

bool RunConfig::selected(const std::string& suite) const {
  return std::find(suites.begin(), suites.end(), suite) != suites.end();
}

void check_config(const RunConfig& c) {
  if (c.n < 1 || 2 * c.n > kMaxVars) throw Error(ErrorKind::ConfigInvalid, "dimension out of range");
  if (static_cast<int>(c.base.size()) != c.n) throw Error(ErrorKind::ConfigInvalid, "base point has the wrong dimension");
  if (c.order < 0) throw Error(ErrorKind::ConfigInvalid, "amplitude order must be >= 0");
  if (c.maxdeg < 2 * c.order + 4) {
    throw Error(ErrorKind::ConfigInvalid, "degree budget violated: maxdeg " + std::to_string(c.maxdeg) +
                                              " < 2N + 4 = " + std::to_string(2 * c.order + 4) +
                                              " (each h-order consumes two derivative orders of the phase)");
  }
  if (c.hmax < 0 || c.hmax > c.order) throw Error(ErrorKind::ConfigInvalid, "hmax must lie in [0, N]");
  if (!(c.u_radius > 0.0 && c.u_radius < c.v_radius && c.v_radius < c.trust_radius)) {
    throw Error(ErrorKind::ConfigInvalid, "domain radii must satisfy 0 < U < V < trust radius");
  }
  if (c.h_grid.empty()) throw Error(ErrorKind::ConfigInvalid, "empty h-grid");
  std::set<double> seen;
  for (double h : c.h_grid) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::ConfigInvalid, "h-grid entries must be positive");
    if (!seen.insert(h).second) throw Error(ErrorKind::ConfigInvalid, "duplicate h-grid entry");
  }
  for (int N : c.kernel_orders) {
    if (N < 0 || N > c.order) throw Error(ErrorKind::ConfigInvalid, "kernel order " + std::to_string(N) + " outside [0, N]");
  }
  if (!std::is_sorted(c.kernel_orders.begin(), c.kernel_orders.end())) {
    throw Error(ErrorKind::ConfigInvalid, "kernel orders must be increasing");
  }
  for (const auto& u : c.test_functions) {
    if (u.nvars() != c.n) throw Error(ErrorKind::ConfigInvalid, "test function has the wrong number of variables");
  }
  for (const auto& s : c.suites) {
    if (std::find(kSuites.begin(), kSuites.end(), s) == kSuites.end()) {
      throw Error(ErrorKind::ConfigInvalid, "unknown suite \"" + s + "\"");
    }
  }
  if (c.format != "json" && c.format != "csv") throw Error(ErrorKind::ConfigInvalid, "format must be json or csv");
  if (c.pairs < 1 || c.samples < 1 || c.gram_degree < 0) throw Error(ErrorKind::ConfigInvalid, "counts must be positive");
  if (c.radial_nodes < 2 || c.angular_nodes < 4 || c.u_radial_nodes < 2 || c.u_angular_nodes < 4) {
    throw Error(ErrorKind::ConfigInvalid, "too few quadrature nodes");
  }
  if (!(c.effective_pair_radius() + c.pair_offset < c.v_radius)) {
    throw Error(ErrorKind::ConfigInvalid, "comparison pairs must stay inside V");
  }
  if (c.delta && !(*c.delta > 0.0)) throw Error(ErrorKind::ConfigInvalid, "delta must be positive");
}

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigInvalid, "config must be a JSON object");
  RunConfig c;
  try {
    c.name = get_or<std::string>(j, "name", c.name);

    const Json& w = section(j, "weight");
    if (!w.contains("terms")) throw Error(ErrorKind::ConfigInvalid, "weight.terms is required");
    c.n = get_or(w, "dimension", 1);
    c.base = w.contains("base") ? point_from_json(w.at("base"), c.n) : Point(static_cast<std::size_t>(c.n), 0.0);
    c.trust_radius = get_or(w, "trust_radius", c.trust_radius);
    c.maxdeg = get_or(w, "maxdeg", 0);

    const Json& am = section(j, "amplitude");
    c.order = get_or(am, "order", c.order);
    c.hmax = get_or(am, "hmax", c.order);
    c.growth_radius = get_or(am, "growth_radius", 0.0);

    if (c.n < 1 || 2 * c.n > kMaxVars) throw Error(ErrorKind::ConfigInvalid, "dimension out of range");
    if (c.maxdeg < 0) throw Error(ErrorKind::ConfigInvalid, "weight.maxdeg must be given");
    c.phi = series_from_json(w.at("terms"), 2 * c.n, c.maxdeg);

    if (j.contains("h_grid")) c.h_grid = parse_grid(j.at("h_grid"));

    const Json& d = section(j, "domains");
    c.shape = domain_shape_from_string(get_or<std::string>(d, "shape", "disc"));
    c.u_radius = get_or(d, "U", c.u_radius);
    c.v_radius = get_or(d, "V", c.v_radius);
    c.radial_nodes = get_or(d, "radial_nodes", c.radial_nodes);
    c.angular_nodes = get_or(d, "angular_nodes", c.angular_nodes);
    c.u_radial_nodes = get_or(d, "u_radial_nodes", c.u_radial_nodes);
    c.u_angular_nodes = get_or(d, "u_angular_nodes", c.u_angular_nodes);

    const Json& k = section(j, "kernel");
    c.kernel_orders = get_or(k, "orders", std::vector<int>{});
    c.pairs = get_or(k, "pairs", c.pairs);
    c.pair_offset = get_or(k, "pair_offset", c.pair_offset);
    c.pair_radius = get_or(k, "pair_radius", 0.0);
    if (k.contains("test_functions")) {
      for (const auto& u : k.at("test_functions")) {
        int deg = 0;
        for (const auto& t : u) {
          int s = 0;
          for (const auto& e : t.at(0)) s += e.get<int>();
          deg = std::max(deg, s);
        }
        c.test_functions.push_back(series_from_json(u, c.n, std::max(deg, 8)));
      }
    }

    const Json& o = section(j, "oracle");
    c.gram_degree = get_or(o, "gram_degree", c.gram_degree);
    if (o.contains("delta") && !o.at("delta").is_null()) c.delta = o.at("delta").get<double>();
    c.margin_radius = get_or(o, "margin_radius", 0.0);
    c.samples = get_or(o, "samples", c.samples);
    c.seed = get_or<std::uint64_t>(o, "seed", c.seed);

    if (j.contains("suites")) c.suites = j.at("suites").get<std::vector<std::string>>();
    const Json& out = section(j, "output");
    c.out_dir = get_or<std::string>(out, "dir", c.out_dir.string());
    c.format = get_or<std::string>(out, "format", c.format);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("malformed config: ") + e.what());
  }
  check_config(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ConfigInvalid, path.string() + ": " + e.what());
  }
  return parse_config(j);
}

Json config_to_json(const RunConfig& c) {
  Json tests = Json::array();
  for (const auto& u : c.test_functions) tests.push_back(series_to_json(u).at("terms"));
  return {
      {"name", c.name},
      {"weight",
       {{"dimension", c.n},
        {"base", point_to_json(c.base)},
        {"trust_radius", number(c.trust_radius)},
        {"maxdeg", c.maxdeg},
        {"terms", series_to_json(c.phi).at("terms")}}},
      {"amplitude", {{"order", c.order}, {"hmax", c.hmax}, {"growth_radius", number(c.effective_growth_radius())}}},
      {"h_grid", vec_json(c.h_grid)},
      {"domains",
       {{"shape", to_string(c.shape)},
        {"U", number(c.u_radius)},
        {"V", number(c.v_radius)},
        {"radial_nodes", c.radial_nodes},
        {"angular_nodes", c.angular_nodes},
        {"u_radial_nodes", c.u_radial_nodes},
        {"u_angular_nodes", c.u_angular_nodes}}},
      {"kernel",
       {{"orders", c.effective_kernel_orders()}, {"pairs", c.pairs}, {"pair_radius", number(c.effective_pair_radius())}, {"pair_offset", number(c.pair_offset)}, {"test_functions", tests}}},
      {"oracle",
       {{"gram_degree", c.gram_degree},
        {"delta", c.delta ? number(*c.delta) : Json(nullptr)},
        {"margin_radius", number(c.effective_margin_radius())},
        {"samples", c.samples},
        {"seed", c.seed}}},
      {"suites", c.suites},
      {"output", {{"dir", c.out_dir.string()}, {"format", c.format}}},
  };
}

Json run(const RunConfig& c) {
  check_config(c);
  Json report;
  report["schema"] = kReportSchema;
  report["config"] = config_to_json(c);
  Json suites = Json::object();

  std::optional<Pipeline> pl;
  try {
    pl = build_pipeline(c);
  } catch (const std::exception& e) {
    // Nothing downstream can run without a valid weight and phase.
    for (const auto& s : c.suites) suites[s] = error_json(e);
    report["suites"] = suites;
    return report;
  }

  double cmin = 0.0;
  if (c.selected("validate")) {
    try {
      suites["validate"] = validate_suite(c, *pl, cmin);
    } catch (const std::exception& e) {
      suites["validate"] = error_json(e);
    }
  }
  if (c.selected("verify") && !c.selected("validate")) {
    try {
      cmin = quadratic_gap_estimate(pl->w, pl->p, c.effective_margin_radius(), c.samples, c.seed + 12).cmin;
    } catch (const std::exception&) {
      cmin = 0.0;
    }
  }

  std::optional<Amplitude> amp;
  if (c.selected("amplitude") || c.selected("kernel")) {
    Amplitude a;
    try {
      Json s = amplitude_suite(c, *pl, a);
      amp = a;
      if (c.selected("amplitude")) suites["amplitude"] = s;
    } catch (const std::exception& e) {
      if (c.selected("amplitude")) suites["amplitude"] = error_json(e);
      if (c.selected("kernel")) {
        suites["kernel"] = {{"status", "skipped"}, {"reason", std::string("amplitude failed: ") + e.what()}};
      }
    }
  }
  if (c.selected("kernel") && amp) {
    try {
      suites["kernel"] = kernel_suite(c, *pl, *amp);
    } catch (const std::exception& e) {
      suites["kernel"] = error_json(e);
    }
  }
  if (c.selected("verify")) {
    try {
      suites["verify"] = verify_suite(c, *pl, cmin);
    } catch (const std::exception& e) {
      suites["verify"] = error_json(e);
    }
  }
  report["suites"] = suites;
  return report;
}

std::string report_json_text(const Json& report) { return report.dump(2) + "\n"; }

std::string report_csv_text(const Json& report) {
  std::ostringstream out;
  out << "h,N,err_U,beta_running\n";
  const Json* kernel = nullptr;
  if (report.contains("suites") && report.at("suites").contains("kernel")) kernel = &report.at("suites").at("kernel");
  if (kernel == nullptr || !kernel->contains("table")) return out.str();
  const auto cell = [](const Json& v) -> std::string {
    if (v.is_null()) return "";
    return v.dump();  // shortest round-trip form
  };
  const Json& table = kernel->at("table");
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (const auto& e : table[i].at("orders")) {
      const int N = e.at("N").get<int>();
      const Json& run = kernel->at("beta_running").at(std::to_string(N));
      out << cell(table[i].at("h")) << ',' << N << ',' << cell(e.at("err_U")) << ',' << cell(run.at(i)) << '\n';
    }
  }
  return out.str();
}

std::vector<std::filesystem::path> emit(const Json& report, const std::string& format, const std::filesystem::path& dir) {
  std::filesystem::path path;
  if (format == "json") {
    path = dir / "report.json";
    write_text(path, report_json_text(report));
  } else if (format == "csv") {
    path = dir / "kernel.csv";
    write_text(path, report_csv_text(report));
  } else {
    throw Error(ErrorKind::ConfigInvalid, "format must be json or csv");
  }
  return {path};
}

}  // namespace bergman
