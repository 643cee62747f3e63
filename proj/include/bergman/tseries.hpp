#pragma once

// Truncated multivariate power series over complex coefficients.
//
// A series is a polynomial in `nvars` displacement variables known exactly
// up to total degree `maxdeg`; everything above is unknown and never stored.
// Arithmetic propagates precision: the result of combining two series is
// only trusted up to the smaller of the two truncation degrees. A negative
// `maxdeg` denotes a series that carries no information at all.

#include <array>
#include <complex>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <vector>

#include "bergman/errors.hpp"

namespace bergman {

using Complex = std::complex<double>;

inline constexpr int kMaxVars = 16;

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int nvars);
  MultiIndex(std::initializer_list<int> exponents);
  explicit MultiIndex(std::span<const int> exponents);

  static MultiIndex unit(int nvars, int var);

  int size() const { return nvars_; }
  int degree() const { return degree_; }
  int operator[](int var) const { return exps_[static_cast<std::size_t>(var)]; }
  void set(int var, int exponent);

  // Multi-index factorial alpha! as a double.
  double factorial() const;
  std::vector<int> to_vector() const;

  MultiIndex operator+(const MultiIndex& other) const;

  bool operator==(const MultiIndex& other) const = default;
  // Graded order: total degree first, then reverse-lexicographic on exponents
  // so that x^1 precedes y^1 in printed output.
  std::strong_ordering operator<=>(const MultiIndex& other) const;

 private:
  std::array<std::uint8_t, kMaxVars> exps_{};
  std::uint8_t nvars_ = 0;
  std::uint16_t degree_ = 0;
};

class TruncatedSeries {
 public:
  using Terms = std::map<MultiIndex, Complex>;

  TruncatedSeries() = default;
  TruncatedSeries(int nvars, int maxdeg);

  static TruncatedSeries constant(int nvars, int maxdeg, Complex value);
  static TruncatedSeries variable(int nvars, int maxdeg, int var, Complex scale = 1.0);
  static TruncatedSeries monomial(int nvars, int maxdeg, const MultiIndex& exps, Complex value);

  int nvars() const { return nvars_; }
  int maxdeg() const { return maxdeg_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Complex coeff(const MultiIndex& idx) const;
  Complex constant_term() const;
  // Overwrites a coefficient; keys above maxdeg are silently dropped.
  void set(const MultiIndex& idx, Complex value);
  void add_to(const MultiIndex& idx, Complex value);

  // Same coefficients, lower trust degree.
  TruncatedSeries truncated(int maxdeg) const;
  // Same coefficients, with the unknown terms up to `maxdeg` declared zero.
  // Used when a truncated polynomial is taken at face value for evaluation.
  TruncatedSeries padded(int maxdeg) const;
  TruncatedSeries homogeneous_part(int degree) const;
  // Drops coefficients with |c| <= tol.
  TruncatedSeries pruned(double tol = 0.0) const;

  double sup_norm() const;

  TruncatedSeries operator-() const;
  TruncatedSeries& operator+=(const TruncatedSeries& other);
  TruncatedSeries& operator-=(const TruncatedSeries& other);
  TruncatedSeries& operator*=(Complex scalar);

 private:
  int nvars_ = 0;
  int maxdeg_ = -1;
  Terms terms_;
};

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries sub(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries scale(const TruncatedSeries& a, Complex factor);
TruncatedSeries diff(const TruncatedSeries& a, int var);
// Mixed partial derivative d^alpha.
TruncatedSeries diff(const TruncatedSeries& a, const MultiIndex& alpha);
// Composition a(subs[0], ..., subs[nvars-1]); every substituted series must
// vanish at the origin so that the result stays centered.
TruncatedSeries substitute(const TruncatedSeries& a, std::span<const TruncatedSeries> subs);
TruncatedSeries invert(const TruncatedSeries& a);
Complex eval(const TruncatedSeries& a, std::span<const Complex> point);
TruncatedSeries power(const TruncatedSeries& a, int exponent);

// Moves variable i of `a` to variable `targets[i]` of a series in `nvars`
// variables. Several source variables may share a target.
TruncatedSeries embed(const TruncatedSeries& a, int nvars, std::span<const int> targets);

// Entrywise complex conjugate of the coefficients.
TruncatedSeries conj_coeffs(const TruncatedSeries& a);

// max |a_k - b_k| over the common truncation.
double max_abs_diff(const TruncatedSeries& a, const TruncatedSeries& b);

inline TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) { return add(a, b); }
inline TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return sub(a, b); }
inline TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) { return mul(a, b); }
inline TruncatedSeries operator*(Complex s, const TruncatedSeries& a) { return scale(a, s); }
inline TruncatedSeries operator*(const TruncatedSeries& a, Complex s) { return scale(a, s); }

// Formal sum sum_k h^k terms[k].
class HGradedSeries {
 public:
  HGradedSeries() = default;
  explicit HGradedSeries(std::vector<TruncatedSeries> terms);

  int hmax() const { return static_cast<int>(terms_.size()) - 1; }
  const std::vector<TruncatedSeries>& terms() const { return terms_; }
  const TruncatedSeries& operator[](int k) const { return terms_[static_cast<std::size_t>(k)]; }

 private:
  std::vector<TruncatedSeries> terms_;
};

// Enumerates all multi-indices of the given size with total degree `degree`,
// in graded order.
std::vector<MultiIndex> multi_indices_of_degree(int nvars, int degree);

}  // namespace bergman
