#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "bergman/sampling.hpp"
#include "bergman/tseries.hpp"

namespace bergman {

// A real-analytic strictly plurisubharmonic weight Phi, stored as a series in
// the 2n displacement variables (x - x0, conj(x - x0)). Variables 0..n-1 are
// the holomorphic coordinates, n..2n-1 their conjugates.
struct Weight {
  int n = 0;
  Point base;
  TruncatedSeries phi;
  double levi_min = 0.0;
  double trust_radius = std::numeric_limits<double>::infinity();

  int available_degree() const { return phi.maxdeg(); }
  // Phi at an absolute point x.
  double value(const Point& x) const;
};

// Holomorphic Psi(x, ytilde) with Psi(x, conj x) = Phi(x); variables are
// (x - x0, ytilde - conj x0).
struct Polarization {
  int n = 0;
  Point base;
  TruncatedSeries psi;
  Eigen::MatrixXcd b_matrix;

  Complex value(const Point& x, const Point& ytilde) const;
  // Psi(x, conj y), the exponent of the Bergman kernel.
  Complex value_conj(const Point& x, const Point& y) const;
};

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kDegeneracyThreshold = 1e-10;

Weight validate_weight(const TruncatedSeries& raw, const Point& base,
                       double trust_radius = std::numeric_limits<double>::infinity());
Polarization polarize(const Weight& w);

struct GapEstimate {
  double cmin = 0.0;
  double cmax = 0.0;
};

// Extremes of (Phi(x) + Phi(y) - 2 Re Psi(x, conj y)) / |x - y|^2 over sampled
// pairs in the ball of `radius` around the base point.
GapEstimate quadratic_gap_estimate(const Weight& w, const Polarization& p, double radius, int nsamples = 4096,
                                   std::uint64_t seed = 0x5eed);

// d^2 Phi / dx_j d conj(x_k) at an absolute point.
Eigen::MatrixXcd levi_form(const Weight& w, const Point& point);

// Phi + Re g for a holomorphic g in n variables (same displacement frame).
TruncatedSeries add_pluriharmonic(const TruncatedSeries& phi, const TruncatedSeries& g);

// Series argument (x - x0, conj(x - x0)) for evaluating Phi at x.
std::vector<Complex> weight_argument(const Point& base, const Point& x);

}  // namespace bergman
