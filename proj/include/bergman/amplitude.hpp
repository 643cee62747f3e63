#pragma once

#include <map>
#include <vector>

#include "bergman/phase.hpp"

namespace bergman {

// Formal stationary phase for
//   (A u)(y, xt; h) = h^-n  \int\int_{Gamma(y, xt)} e^{2 phi / h} u(x, yt) dx dyt
// around the critical point x = y, yt = xt:
//   (A u) = c0(y, xt) * sum_j h^j (T_j u)(y, xt),
//   c0 = (pi/2)^n / det B,
//   T_j u = [exp(-(h/2) <d_u, B^-1 d_v>) (u(y+u, xt+v) e^{(2/h) R})]_{u=v=0, order h^j}.
// The contour measure is normalized so that the Gaussian weight |x|^2/2 gives
// A 1 = pi.
//
// T_j involves Taylor coefficients of Psi up to degree 2j + 2 and of u up to
// degree 2j, so a series trusted to degree D maps to one trusted to D - 2j.
class ExpansionTermOps {
 public:
  ExpansionTermOps(const PhaseData& pd, int hmax);

  int hmax() const { return hmax_; }
  const TruncatedSeries& c0() const { return c0_; }

  // [T_0 f, T_1 f, ..., T_jmax f], jmax <= hmax.
  std::vector<TruncatedSeries> apply(const TruncatedSeries& f, int jmax) const;

  // Gaussian moment of the fast monomial u^alpha v^beta with h factored out:
  // (-1/2)^p times the sum over perfect matchings of u- and v-factors of
  // prod (B^-1)_{k j}. Zero unless |alpha| = |beta| = p.
  const TruncatedSeries& wick(const MultiIndex& fast) const;

 private:
  int n_ = 0;
  int hmax_ = 0;
  int slow_maxdeg_ = 0;
  TruncatedSeries c0_;
  SeriesMatrix b_inverse_;
  // exp((2/h) R) split by half-integer h-weight: entry W has weight W/2.
  std::vector<DisplacementSeries> exp_remainder_;
  mutable std::map<MultiIndex, TruncatedSeries> wick_cache_;
};

// (A u)_m = c0 * sum_{j + k = m} T_j u_k for m = 0..hmax.
HGradedSeries formal_expansion(const PhaseData& pd, const HGradedSeries& u, int hmax);

struct Amplitude {
  int n = 0;
  int order = 0;
  std::vector<TruncatedSeries> coeffs;  // a_0 .. a_N in (x, yt)
  TruncatedSeries c0;
  double growth_C = 0.0;

  HGradedSeries as_graded() const { return HGradedSeries(coeffs); }
};

// Constant (pi/2)^n fixing the contour-measure normalization.
double leading_normalization(int n);

// a_0 = 1/c0, a_m = -sum_{j=1..m} T_j a_{m-j}, so that A a = 1 + O(h^{N+1}).
Amplitude solve_amplitude(const PhaseData& pd, int order);

// (sup |a_k| / k^k)^{1/(k+1)} with 0^0 = 1, sup over the torus |x_j| = |yt_j| = radius
// around the base point (the maximum of |a_k| on the closed polydisc).
std::vector<double> normalized_growth(const Amplitude& a, double radius);
// Smallest C with sup |a_k| <= C^{k+1} k^k for all computed k, times 2.
double estimate_growth(Amplitude& a, double radius);

struct GrowthBand {
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool within = false;
};
GrowthBand growth_band(const std::vector<double>& normalized, double factor = 2.0);

struct Realization {
  TruncatedSeries series;
  int used_order = 0;  // last retained k
};

// sum_{k <= min(N, 1/(C e h))} a_k h^k.
Realization realize(const Amplitude& a, double h);
// Same sum with an explicit last order, ignoring the growth cutoff.
Realization realize_fixed(const Amplitude& a, double h, int last_order);

}  // namespace bergman
