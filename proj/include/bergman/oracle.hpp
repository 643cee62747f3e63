#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bergman/phase.hpp"
#include "bergman/projector.hpp"

namespace bergman {

// Brute-force Bergman kernel of the span of monomials (x - x0)^alpha,
// |alpha| <= D, in L^2(V, e^{-2 Phi/h}):
//   K(x, conj y) = sum_{alpha, beta} e_alpha(x) (G^{-T})_{alpha beta} conj(e_beta(y)),
//   G_{alpha beta} = int e_alpha conj(e_beta) e^{-2 Phi/h}.
struct GramKernel {
  int n = 0;
  int degree = 0;
  double h = 0.0;
  Point base;
  std::vector<MultiIndex> basis;
  Eigen::MatrixXcd gram;
  Eigen::MatrixXcd coef;  // G^{-T}
  // Spectral condition number of the Jacobi-scaled Gram matrix.
  double condition = 0.0;

  Complex operator()(const Point& x, const Point& y) const;
  Eigen::VectorXcd basis_values(const Point& x) const;
};

inline constexpr double kMaxGramCondition = 1e12;

GramKernel gram_bergman(const Weight& w, const DomainSpec& dom, int degree);
// Lowers D from `degree` until the condition estimate is acceptable.
GramKernel gram_bergman_capped(const Weight& w, const DomainSpec& dom, int degree);
// max relative change of the oracle kernel between degree D and D + step at the
// given (x, y) pairs.
double gram_convergence(const Weight& w, const DomainSpec& dom, int degree, const std::vector<std::pair<Point, Point>>& pairs,
                        int step = 5);

using KernelFunction = std::function<Complex(const Point&, const Point&)>;

struct KernelComparison {
  std::vector<double> errors;  // relative, one per pair
  double max = 0.0;
  double median = 0.0;
};

KernelComparison compare_kernels(const KernelFunction& asym, const KernelFunction& exact,
                                 const std::vector<std::pair<Point, Point>>& pairs);

// Pairs (x, x + d) with x in the ball of `radius` and |d| <= `offset`.
std::vector<std::pair<Point, Point>> near_diagonal_pairs(int n, const Point& center, double radius, double offset,
                                                         int count, std::uint64_t seed);

// Radial cutoff: 1 on the plateau, exp(1 - 1/(1 - t^2)) on the transition
// layer, 0 beyond the support (radii as fractions of the domain radius).
struct Cutoff {
  Point center;
  double radius = 1.0;
  double plateau = 0.6;
  double support = 0.9;

  double operator()(const Point& y) const;
};

// Fixed by the Gaussian calibration: with this sign the u = 1 inversion
// returns +1 rather than -1.
inline constexpr double kInversionOrientation = 1.0;

struct FourierInversion {
  Complex value;
  double residual = 0.0;  // |value - u(x)| e^{-Phi(x)/h}
};

// (2 pi h)^{-n} int_{Lambda(x)} e^{(i/h)(x - y) theta} u(y) chi(y) dy dtheta with
// theta = theta(x, y) and dy dtheta = orientation * (2i)^n det(d_{conj y} theta) L(dy).
FourierInversion fourier_inversion_check(const Weight& w, const TruncatedSeries& u, const Point& x,
                                         const DomainSpec& dom, double h, double orientation = kInversionOrientation,
                                         double tol = 1e-10);

struct PointwiseBound {
  std::vector<double> h;
  std::vector<double> ratio;  // sup_{V1} |u| e^{-Phi/h} h^n / ||u||_{H_Phi(V)}
  double max_ratio = 0.0;
  bool bounded = false;       // no growth as h decreases
};

PointwiseBound pointwise_bound_check(const Weight& w, const TruncatedSeries& u, const DomainSpec& V1,
                                     const DomainSpec& V, const std::vector<double>& h_grid);

struct InequalityProbe {
  Weight weight;
  PhaseData phase;
  double delta = 0.0;
  Point z;
  double radius = 0.0;
  int nsamples = 10000;
  std::uint64_t seed = 0x1e;
};

struct InequalityReport {
  double delta = 0.0;
  double inversion_margin = 0.0;   // min (Phi(x) - Phi(y) + Im((x-y) theta)) / |x-y|^2 - delta
  double gz_diagonal_margin = 0.0; // min -G_z / (|x-z|^2 + |y-z|^2) on the diagonal contour
  double gz_composed_margin = 0.0; // same on the composed contour, all four displacements
  double amplitude_margin = 0.0;   // -Re phi / (|u|^2 + |v|^2) on Gamma(z, conj z)
};

InequalityReport inequality_suite(const InequalityProbe& probe);

struct SpCase {
  std::string label;
  TruncatedSeries u;  // symbol in (x - x0, yt - conj x0)
  Point y0;
  Point xt0;
  int order = 4;      // partial sum retained; the next term bounds the error
};

struct SpRow {
  std::string label;
  double h = 0.0;
  Complex quadrature;
  Complex partial;
  Complex next_term;
  double error = 0.0;
  bool terminating = false;
  bool pass = false;
};

struct SpOptions {
  double max_radius = 4.0;
  int radial_nodes = 160;
  int angular_nodes = 128;
  double terminating_tol = 1e-8;
  double next_term_factor = 10.0;
};

// Contour quadrature of (1/h) int_{Gamma(y0, xt0)} e^{2 phi/h} u dx dyt against
// the formal expansion (n = 1). The disc in the contour parameter is chosen
// where max Re phi on its boundary circle is smallest.
std::vector<SpRow> sp_quadrature_check(const PhaseData& pd, const std::vector<SpCase>& cases,
                                       const std::vector<double>& h_grid, const SpOptions& opt = {});

// v_z(x) = (2 pi h)^{-n} e^{(i/h)(x - z) theta(x, z)} v(z) chi(z) det(d_{conj z} theta(x, z)).
struct LocalizedElement {
  Point z;
  double h = 0.0;
  Complex vz_factor;  // v(z) chi(z)
  ContourSpec contour;
  double margin = 0.0;  // domination margin, see localized_element

  Complex operator()(const Point& x) const;
};

// Checks -Im((x - z) theta(x, z)) + Phi(z) <= Phi(x) - delta |x - z|^2 on
// samples in the ball of `radius` around z; BadContour if it fails.
LocalizedElement localized_element(const TruncatedSeries& v, const Point& z, const Weight& w, double h,
                                   const Cutoff& chi, double delta, double radius, int nsamples = 4096,
                                   std::uint64_t seed = 0x10c);

}  // namespace bergman
