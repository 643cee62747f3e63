#pragma once

#include <map>
#include <vector>

#include "bergman/tseries.hpp"

namespace bergman {

// Square matrix whose entries are series in a common set of variables.
class SeriesMatrix {
 public:
  SeriesMatrix() = default;
  SeriesMatrix(int dim, int nvars, int maxdeg);

  int dim() const { return dim_; }
  TruncatedSeries& operator()(int i, int j) { return entries_[index(i, j)]; }
  const TruncatedSeries& operator()(int i, int j) const { return entries_[index(i, j)]; }

  SeriesMatrix transposed() const;
  // Entrywise evaluation.
  std::vector<Complex> eval_at(std::span<const Complex> point) const;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i * dim_ + j); }

  int dim_ = 0;
  std::vector<TruncatedSeries> entries_;
};

struct SeriesInverse {
  SeriesMatrix inverse;
  TruncatedSeries determinant;
};

// Gauss-Jordan elimination over the series ring, pivoting on the size of the
// constant terms. Requires the constant-term matrix to be invertible.
SeriesInverse invert_series_matrix(const SeriesMatrix& m);

// Polynomial in 2n "fast" displacement variables (u, v) whose coefficients are
// series in the 2n "slow" base variables (y, xtilde).
class DisplacementSeries {
 public:
  using Terms = std::map<MultiIndex, TruncatedSeries>;

  DisplacementSeries() = default;
  DisplacementSeries(int nfast, int nslow);

  int nfast() const { return nfast_; }
  int nslow() const { return nslow_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  const TruncatedSeries* find(const MultiIndex& fast) const;
  void add_to(const MultiIndex& fast, const TruncatedSeries& coeff);

  // Part of fast total degree `degree`.
  DisplacementSeries homogeneous_part(int degree) const;
  // Lowers every coefficient's trust degree to at most `slow_maxdeg`.
  DisplacementSeries slow_truncated(int slow_maxdeg) const;

  // Value of the fast polynomial at fixed slow and fast points.
  Complex eval(std::span<const Complex> slow, std::span<const Complex> fast) const;

 private:
  int nfast_ = 0;
  int nslow_ = 0;
  Terms terms_;
};

// Product truncated at total fast degree `fast_maxdeg`; coefficient products
// are truncated at `slow_maxdeg`.
DisplacementSeries mul(const DisplacementSeries& a, const DisplacementSeries& b, int fast_maxdeg, int slow_maxdeg);

// Taylor expansion of f(y + u, xtilde + v) in the fast variables, with
// coefficients d^alpha f / alpha! as series in the slow variables. Keeps fast
// degrees up to `fast_maxdeg`.
DisplacementSeries fast_expansion(const TruncatedSeries& f, int fast_maxdeg);

}  // namespace bergman
