#include "bergman/displacement.hpp"

#include <algorithm>
#include <cmath>

namespace bergman {

SeriesMatrix::SeriesMatrix(int dim, int nvars, int maxdeg)
    : dim_(dim), entries_(static_cast<std::size_t>(dim * dim), TruncatedSeries(nvars, maxdeg)) {}

SeriesMatrix SeriesMatrix::transposed() const {
  SeriesMatrix t = *this;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) t(i, j) = (*this)(j, i);
  return t;
}

std::vector<Complex> SeriesMatrix::eval_at(std::span<const Complex> point) const {
  std::vector<Complex> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(eval(e, point));
  return out;
}

SeriesInverse invert_series_matrix(const SeriesMatrix& m) {
  const int n = m.dim();
  if (n == 0) return {};
  const int nvars = m(0, 0).nvars();
  int maxdeg = m(0, 0).maxdeg();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) maxdeg = std::min(maxdeg, m(i, j).maxdeg());

  SeriesMatrix a = m;
  SeriesMatrix inv(n, nvars, maxdeg);
  for (int i = 0; i < n; ++i) inv(i, i) = TruncatedSeries::constant(nvars, maxdeg, 1.0);
  TruncatedSeries det = TruncatedSeries::constant(nvars, maxdeg, 1.0);

  auto swap_rows = [n](SeriesMatrix& s, int r1, int r2) {
    for (int j = 0; j < n; ++j) std::swap(s(r1, j), s(r2, j));
  };

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col).constant_term()) > std::abs(a(pivot, col).constant_term())) pivot = r;
    if (a(pivot, col).constant_term() == Complex{}) {
      throw Error(ErrorKind::DegenerateHessian, "series matrix is singular at the base point");
    }
    if (pivot != col) {
      swap_rows(a, pivot, col);
      swap_rows(inv, pivot, col);
      det = -det;
    }
    det = mul(det, a(col, col));
    const TruncatedSeries piv_inv = invert(a(col, col));
    for (int j = 0; j < n; ++j) {
      a(col, j) = mul(a(col, j), piv_inv);
      inv(col, j) = mul(inv(col, j), piv_inv);
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const TruncatedSeries factor = a(r, col);
      if (factor.empty()) continue;
      for (int j = 0; j < n; ++j) {
        a(r, j) -= mul(factor, a(col, j));
        inv(r, j) -= mul(factor, inv(col, j));
      }
    }
  }
  return {std::move(inv), std::move(det)};
}

DisplacementSeries::DisplacementSeries(int nfast, int nslow) : nfast_(nfast), nslow_(nslow) {}

const TruncatedSeries* DisplacementSeries::find(const MultiIndex& fast) const {
  auto it = terms_.find(fast);
  return it == terms_.end() ? nullptr : &it->second;
}

void DisplacementSeries::add_to(const MultiIndex& fast, const TruncatedSeries& coeff) {
  if (coeff.maxdeg() < 0) return;
  auto [it, inserted] = terms_.try_emplace(fast, coeff);
  if (!inserted) it->second += coeff;
}

DisplacementSeries DisplacementSeries::homogeneous_part(int degree) const {
  DisplacementSeries r(nfast_, nslow_);
  for (const auto& [k, c] : terms_)
    if (k.degree() == degree) r.terms_.emplace_hint(r.terms_.end(), k, c);
  return r;
}

DisplacementSeries DisplacementSeries::slow_truncated(int slow_maxdeg) const {
  DisplacementSeries r(nfast_, nslow_);
  if (slow_maxdeg < 0) return r;
  for (const auto& [k, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), k, c.truncated(slow_maxdeg));
  return r;
}

Complex DisplacementSeries::eval(std::span<const Complex> slow, std::span<const Complex> fast) const {
  Complex sum{};
  for (const auto& [k, c] : terms_) {
    Complex m = bergman::eval(c, slow);
    for (int v = 0; v < nfast_; ++v)
      if (k[v] != 0) m *= std::pow(fast[static_cast<std::size_t>(v)], k[v]);
    sum += m;
  }
  return sum;
}

DisplacementSeries mul(const DisplacementSeries& a, const DisplacementSeries& b, int fast_maxdeg, int slow_maxdeg) {
  if (a.nfast() != b.nfast() || a.nslow() != b.nslow()) {
    throw Error(ErrorKind::VariableMismatch, "displacement series shapes differ");
  }
  DisplacementSeries r(a.nfast(), a.nslow());
  if (slow_maxdeg < 0) return r;
  for (const auto& [ka, ca] : a.terms()) {
    if (ka.degree() > fast_maxdeg) break;
    const TruncatedSeries ca_t = ca.truncated(slow_maxdeg);
    for (const auto& [kb, cb] : b.terms()) {
      if (ka.degree() + kb.degree() > fast_maxdeg) break;
      r.add_to(ka + kb, mul(ca_t, cb.truncated(slow_maxdeg)));
    }
  }
  return r;
}

DisplacementSeries fast_expansion(const TruncatedSeries& f, int fast_maxdeg) {
  const int nvars = f.nvars();
  DisplacementSeries r(nvars, nvars);
  for (int d = 0; d <= std::min(fast_maxdeg, f.maxdeg()); ++d) {
    for (const auto& alpha : multi_indices_of_degree(nvars, d)) {
      TruncatedSeries c = scale(diff(f, alpha), 1.0 / alpha.factorial());
      if (!c.empty()) r.add_to(alpha, c);
    }
  }
  return r;
}

}  // namespace bergman
