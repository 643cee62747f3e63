#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Dense>

#include "bergman/displacement.hpp"
#include "bergman/weight.hpp"

namespace bergman {

// The phase
//   phi(y, xt; x, yt) = Psi(x, yt) - Psi(x, xt) - Psi(y, yt) + Psi(y, xt)
// in base variables (y, xt) and integration variables (x, yt). With
// x = y + u, yt = xt + v it reads u^T B(y, xt) v + R(y, xt; u, v), R cubic and
// higher in (u, v).
struct PhaseData {
  int n = 0;
  Polarization polarization;
  // Series in 4n variables ordered (y, xt, x, yt).
  TruncatedSeries phi4;
  // B(y, xt) = Psi''_{x yt}(y, xt) as series in (y, xt).
  SeriesMatrix quad_b;
  SeriesMatrix b_inverse;
  TruncatedSeries det_b;
  // det phi''_{(x,yt),(x,yt)} at the base point.
  Complex hess_det;
  // Fast degree >= 3 part of phi, fast variables (u, v), slow (y, xt).
  DisplacementSeries remainder;

  int psi_degree() const { return polarization.psi.maxdeg(); }
  // phi at absolute coordinates.
  Complex value(const Point& y, const Point& xt, const Point& x, const Point& yt) const;
};

PhaseData build_phase(const Polarization& p);

enum class ContourKind { Amplitude, Inversion };

const char* to_string(ContourKind kind);

// Derivative tables of Phi needed to evaluate the inversion contour
//   theta(x, y) = (2/i) (dPhi/dy(y) + 1/2 Phi''_yy(y) (x - y))
// and its Jacobian det(d theta / d conj y).
struct InversionContourData {
  Point base;
  std::vector<TruncatedSeries> grad;       // dPhi/dy_j
  std::vector<TruncatedSeries> hess;       // d2Phi/dy_j dy_k, row-major
  std::vector<TruncatedSeries> mixed;      // d2Phi/dy_j dconj(y_l)
  std::vector<TruncatedSeries> hess_mixed; // d3Phi/dy_j dy_k dconj(y_l), [j][k][l]
};

struct ContourSpec {
  ContourKind kind = ContourKind::Amplitude;
  int n = 0;
  // Amplitude contours: the base point (y0, xt0) as 2n absolute coordinates.
  // Inversion contours: the point x.
  Point at;
  // B(y0, xt0) for amplitude contours.
  Eigen::MatrixXcd b;
  InversionContourData inversion;
  double margin = 0.0;

  // Amplitude contour: u -> (x, yt) = (y0 + u, xt0 - conj(B^T u)).
  std::pair<Point, Point> amplitude_point(const Point& u) const;
  // Inversion contour: theta(x, y) and det(d_{conj y} theta(x, y)).
  Point theta(const Point& x, const Point& y) const;
  Complex theta_jacobian(const Point& x, const Point& y) const;
};

ContourSpec build_good_contour(const PhaseData& pd, const Point& y0, const Point& xt0);
ContourSpec build_inversion_contour(const Weight& w, const Point& x);

struct MarginReport {
  ContourKind kind = ContourKind::Amplitude;
  double radius = 0.0;
  int nsamples = 0;
  double margin = 0.0;
  Point argmin;
};

// Amplitude contours: min of -Re phi / (|u|^2 + |v|^2) over u in the ball.
MarginReport verify_contour(const PhaseData& pd, ContourSpec& c, double radius, int nsamples = 10000,
                            std::uint64_t seed = 0xc0);
// Inversion contours: min of (Phi(x) - Phi(y) + Im((x - y) . theta)) / |x - y|^2
// over y in the ball around the contour point.
MarginReport verify_contour(const Weight& w, ContourSpec& c, double radius, int nsamples = 10000,
                            std::uint64_t seed = 0xc1);

// -Im((x - y) . theta(x, y)) + Phi(y) - Phi(x); nonpositive on good contours.
double inversion_exponent(const Weight& w, const ContourSpec& c, const Point& x, const Point& y);

}  // namespace bergman
