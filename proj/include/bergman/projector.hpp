#pragma once

#include <vector>

#include "bergman/amplitude.hpp"
#include "bergman/weight.hpp"

namespace bergman {

enum class DomainShape { Disc, Polydisc, Ball };

const char* to_string(DomainShape shape);
DomainShape domain_shape_from_string(const std::string& name);

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int m);

// Quadrature over a disc / polydisc / ball around `center`: Gauss-Legendre in
// the radial variable(s), split into panels at `breakpoints` (fractions of the
// radius), times the trapezoid rule in each angle.
struct DomainSpec {
  DomainShape shape = DomainShape::Disc;
  int n = 1;
  Point center;
  double radius = 1.0;
  int radial_nodes = 64;
  int angular_nodes = 128;
  std::vector<double> breakpoints;
  double h = 0.1;

  std::vector<Point> nodes;
  std::vector<double> weights;

  static DomainSpec build(DomainShape shape, int n, const Point& center, double radius, int radial_nodes,
                          int angular_nodes, double h, std::vector<double> breakpoints = {});
  // Same region with twice the nodes along every axis.
  DomainSpec refined() const;
  DomainSpec with_h(double new_h) const;
  bool contains(const Point& x) const;
  std::size_t size() const { return nodes.size(); }
};

// A series s(x, yt) in 2n variables evaluated many times with x fixed:
// s(x, yt) = sum_beta c_beta(x) yt^beta.
class SplitPolynomial {
 public:
  SplitPolynomial() = default;
  explicit SplitPolynomial(const TruncatedSeries& s);

  // c_beta(x) for x a displacement vector.
  std::vector<Complex> fix(std::span<const Complex> x) const;
  Complex eval(const std::vector<Complex>& fixed, std::span<const Complex> yt) const;

 private:
  int n_ = 0;
  int maxpow_ = 0;
  std::vector<MultiIndex> outer_;
  std::vector<std::vector<std::pair<MultiIndex, Complex>>> inner_;
};

// K(x, conj y) = h^-n exp((2/h) Psi(x, conj y)) a(x, conj y) with a realized
// amplitude.
class KernelEvaluator {
 public:
  KernelEvaluator() = default;
  KernelEvaluator(const Polarization& p, TruncatedSeries amplitude, double h, int used_order);

  int n() const { return n_; }
  double h() const { return h_; }
  int used_order() const { return used_order_; }
  const TruncatedSeries& amplitude() const { return amp_; }

  Complex operator()(const Point& x, const Point& y) const;

  // Fast evaluation along a row of fixed x. The returned pair is
  // (2 Psi(x, conj y) / h, a(x, conj y)); the caller combines exponents.
  class Row {
   public:
    std::pair<Complex, Complex> at(const Point& y) const;

   private:
    friend class KernelEvaluator;
    const KernelEvaluator* k_ = nullptr;
    std::vector<Complex> psi_;
    std::vector<Complex> amp_;
  };
  Row row(const Point& x) const;

 private:
  int n_ = 0;
  double h_ = 0.0;
  int used_order_ = 0;
  Point base_;
  TruncatedSeries amp_;
  SplitPolynomial psi_split_;
  SplitPolynomial amp_split_;
};

// Kernel with the realization cutoff of the amplitude.
KernelEvaluator assemble_kernel(const Polarization& p, const Amplitude& a, double h);
// Kernel with an explicit last amplitude order.
KernelEvaluator assemble_kernel_fixed(const Polarization& p, const Amplitude& a, double h, int last_order);

// Holomorphic test functions are polynomials in the displacement x - x0.
Complex eval_test_function(const TruncatedSeries& u, const Point& base, const Point& x);

// h^-n sum_nodes K(x, conj y) u(y) e^{-2 Phi(y)/h} w(y) at each evaluation point.
// A refined grid is evaluated on the first few points; disagreement beyond
// 10 * tol (relative) raises QuadratureUnderresolved.
std::vector<Complex> apply_projection(const KernelEvaluator& k, const TruncatedSeries& u, const Weight& w,
                                      const DomainSpec& dom, const std::vector<Point>& eval_pts, double tol = 1e-9);

// ||Pi u - u||_{U} / ||u||_{V}, both norms weighted by e^{-2 Phi/h}.
double reproducing_error(const KernelEvaluator& k, const TruncatedSeries& u, const Weight& w, const DomainSpec& U,
                         const DomainSpec& V, double tol = 1e-9);

struct DecayFit {
  double beta = 0.0;
  double alpha = 0.0;
  double r2 = 0.0;         // log err ~ alpha - beta / h
  double loglog_r2 = 0.0;  // log err ~ c + p log h, for comparison
  double loglog_slope = 0.0;
};

// Least squares of log err against 1/h over at least `min_points` samples.
DecayFit decay_fit(const std::vector<std::pair<double, double>>& errors, std::size_t min_points = 3);

// Errors at truncation orders N-1 and N should differ by a factor ~ h^power.
// The local exponent log(r_i / r_{i+1}) / log(h_i / h_{i+1}) of r = err_N / err_{N-1}
// between adjacent grid points must lie within [power / factor, power * factor].
struct OrderSensitivity {
  std::vector<double> h;
  std::vector<double> ratio;
  std::vector<double> exponent;  // one per adjacent pair
  bool pass = false;
};

OrderSensitivity order_sensitivity(const std::vector<double>& h, const std::vector<double>& err_lower,
                                   const std::vector<double>& err_upper, double power = 1.0, double factor = 3.0);

}  // namespace bergman
