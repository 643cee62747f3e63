#include "bergman/tseries.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bergman {

namespace {

void require_same_nvars(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.nvars() != b.nvars()) {
    throw Error(ErrorKind::VariableMismatch,
                "series in " + std::to_string(a.nvars()) + " and " + std::to_string(b.nvars()) + " variables");
  }
}

void require_nvars(int nvars) {
  if (nvars < 0 || nvars > kMaxVars) {
    throw Error(ErrorKind::BadVariable, "variable count " + std::to_string(nvars) + " outside [0, 16]");
  }
}

}  // namespace

MultiIndex::MultiIndex(int nvars) {
  require_nvars(nvars);
  nvars_ = static_cast<std::uint8_t>(nvars);
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::span<const int>(exponents.begin(), exponents.size())) {}

MultiIndex::MultiIndex(std::span<const int> exponents) : MultiIndex(static_cast<int>(exponents.size())) {
  for (std::size_t i = 0; i < exponents.size(); ++i) set(static_cast<int>(i), exponents[i]);
}

MultiIndex MultiIndex::unit(int nvars, int var) {
  MultiIndex m(nvars);
  m.set(var, 1);
  return m;
}

void MultiIndex::set(int var, int exponent) {
  if (var < 0 || var >= nvars_) throw Error(ErrorKind::BadVariable, "variable index " + std::to_string(var));
  if (exponent < 0 || exponent > 255) throw Error(ErrorKind::BadVariable, "exponent out of range");
  auto& slot = exps_[static_cast<std::size_t>(var)];
  degree_ = static_cast<std::uint16_t>(degree_ - slot + exponent);
  slot = static_cast<std::uint8_t>(exponent);
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int i = 0; i < nvars_; ++i) f *= std::tgamma(exps_[static_cast<std::size_t>(i)] + 1.0);
  return f;
}

std::vector<int> MultiIndex::to_vector() const {
  return std::vector<int>(exps_.begin(), exps_.begin() + nvars_);
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (nvars_ != other.nvars_) throw Error(ErrorKind::VariableMismatch, "multi-index sizes differ");
  MultiIndex r = *this;
  for (int i = 0; i < nvars_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const int e = exps_[k] + other.exps_[k];
    if (e > 255) throw Error(ErrorKind::BadVariable, "exponent overflow");
    r.exps_[k] = static_cast<std::uint8_t>(e);
  }
  r.degree_ = static_cast<std::uint16_t>(degree_ + other.degree_);
  return r;
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
  if (auto c = degree_ <=> other.degree_; c != 0) return c;
  if (auto c = nvars_ <=> other.nvars_; c != 0) return c;
  for (int i = 0; i < nvars_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (exps_[k] != other.exps_[k]) return other.exps_[k] <=> exps_[k];
  }
  return std::strong_ordering::equal;
}

TruncatedSeries::TruncatedSeries(int nvars, int maxdeg) : nvars_(nvars), maxdeg_(maxdeg) { require_nvars(nvars); }

TruncatedSeries TruncatedSeries::constant(int nvars, int maxdeg, Complex value) {
  TruncatedSeries s(nvars, maxdeg);
  s.set(MultiIndex(nvars), value);
  return s;
}

TruncatedSeries TruncatedSeries::variable(int nvars, int maxdeg, int var, Complex scale) {
  TruncatedSeries s(nvars, maxdeg);
  s.set(MultiIndex::unit(nvars, var), scale);
  return s;
}

TruncatedSeries TruncatedSeries::monomial(int nvars, int maxdeg, const MultiIndex& exps, Complex value) {
  if (exps.size() != nvars) throw Error(ErrorKind::VariableMismatch, "monomial size");
  TruncatedSeries s(nvars, maxdeg);
  s.set(exps, value);
  return s;
}

Complex TruncatedSeries::coeff(const MultiIndex& idx) const {
  auto it = terms_.find(idx);
  return it == terms_.end() ? Complex{} : it->second;
}

Complex TruncatedSeries::constant_term() const { return coeff(MultiIndex(nvars_)); }

void TruncatedSeries::set(const MultiIndex& idx, Complex value) {
  if (idx.size() != nvars_) throw Error(ErrorKind::VariableMismatch, "index size");
  if (idx.degree() > maxdeg_) return;
  if (value == Complex{}) {
    terms_.erase(idx);
  } else {
    terms_[idx] = value;
  }
}

void TruncatedSeries::add_to(const MultiIndex& idx, Complex value) {
  if (idx.degree() > maxdeg_ || value == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(idx, value);
  if (!inserted) {
    it->second += value;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

TruncatedSeries TruncatedSeries::truncated(int maxdeg) const {
  if (maxdeg >= maxdeg_) return *this;
  TruncatedSeries r(nvars_, maxdeg);
  for (const auto& [k, c] : terms_) {
    if (k.degree() > maxdeg) break;
    r.terms_.emplace_hint(r.terms_.end(), k, c);
  }
  return r;
}

TruncatedSeries TruncatedSeries::padded(int maxdeg) const {
  TruncatedSeries r = *this;
  r.maxdeg_ = std::max(maxdeg_, maxdeg);
  return r;
}

TruncatedSeries TruncatedSeries::homogeneous_part(int degree) const {
  TruncatedSeries r(nvars_, maxdeg_);
  for (const auto& [k, c] : terms_)
    if (k.degree() == degree) r.terms_.emplace_hint(r.terms_.end(), k, c);
  return r;
}

TruncatedSeries TruncatedSeries::pruned(double tol) const {
  TruncatedSeries r(nvars_, maxdeg_);
  for (const auto& [k, c] : terms_)
    if (std::abs(c) > tol) r.terms_.emplace_hint(r.terms_.end(), k, c);
  return r;
}

double TruncatedSeries::sup_norm() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

TruncatedSeries TruncatedSeries::operator-() const {
  TruncatedSeries r = *this;
  for (auto& [k, c] : r.terms_) c = -c;
  return r;
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& other) {
  require_same_nvars(*this, other);
  if (other.maxdeg_ < maxdeg_) *this = truncated(other.maxdeg_);
  for (const auto& [k, c] : other.terms_) add_to(k, c);
  return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& other) {
  require_same_nvars(*this, other);
  if (other.maxdeg_ < maxdeg_) *this = truncated(other.maxdeg_);
  for (const auto& [k, c] : other.terms_) add_to(k, -c);
  return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(Complex scalar) {
  if (scalar == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= scalar;
  return *this;
}

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries r = a;
  r += b;
  return r;
}

TruncatedSeries sub(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries r = a;
  r -= b;
  return r;
}

TruncatedSeries scale(const TruncatedSeries& a, Complex factor) {
  TruncatedSeries r = a;
  r *= factor;
  return r;
}

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_nvars(a, b);
  const int maxdeg = std::min(a.maxdeg(), b.maxdeg());
  TruncatedSeries r(a.nvars(), maxdeg);
  for (const auto& [ka, ca] : a.terms()) {
    if (ka.degree() > maxdeg) break;
    const int budget = maxdeg - ka.degree();
    for (const auto& [kb, cb] : b.terms()) {
      if (kb.degree() > budget) break;
      r.add_to(ka + kb, ca * cb);
    }
  }
  return r;
}

TruncatedSeries diff(const TruncatedSeries& a, int var) {
  if (var < 0 || var >= a.nvars()) throw Error(ErrorKind::BadVariable, "cannot differentiate in variable " + std::to_string(var));
  TruncatedSeries r(a.nvars(), a.maxdeg() - 1);
  for (const auto& [k, c] : a.terms()) {
    const int e = k[var];
    if (e == 0) continue;
    MultiIndex lowered = k;
    lowered.set(var, e - 1);
    r.add_to(lowered, c * static_cast<double>(e));
  }
  return r;
}

TruncatedSeries diff(const TruncatedSeries& a, const MultiIndex& alpha) {
  if (alpha.size() != a.nvars()) throw Error(ErrorKind::VariableMismatch, "derivative multi-index size");
  TruncatedSeries r(a.nvars(), a.maxdeg() - alpha.degree());
  for (const auto& [k, c] : a.terms()) {
    MultiIndex lowered = k;
    double factor = 1.0;
    bool vanishes = false;
    for (int v = 0; v < a.nvars() && !vanishes; ++v) {
      const int e = k[v];
      const int d = alpha[v];
      if (d > e) {
        vanishes = true;
        break;
      }
      for (int i = 0; i < d; ++i) factor *= static_cast<double>(e - i);
      lowered.set(v, e - d);
    }
    if (!vanishes) r.add_to(lowered, c * factor);
  }
  return r;
}

TruncatedSeries power(const TruncatedSeries& a, int exponent) {
  TruncatedSeries r = TruncatedSeries::constant(a.nvars(), a.maxdeg(), 1.0);
  for (int i = 0; i < exponent; ++i) r = mul(r, a);
  return r;
}

TruncatedSeries substitute(const TruncatedSeries& a, std::span<const TruncatedSeries> subs) {
  if (static_cast<int>(subs.size()) != a.nvars()) {
    throw Error(ErrorKind::VariableMismatch, "substitution needs one series per variable");
  }
  if (subs.empty()) return a;
  const int target_nvars = subs.front().nvars();
  int maxdeg = a.maxdeg();
  for (const auto& s : subs) {
    if (s.nvars() != target_nvars) throw Error(ErrorKind::VariableMismatch, "substituted series disagree on variables");
    if (s.constant_term() != Complex{}) {
      throw Error(ErrorKind::NonzeroConstantTerm, "substitution would move the expansion point");
    }
    maxdeg = std::min(maxdeg, s.maxdeg());
  }
  TruncatedSeries r(target_nvars, maxdeg);
  // powers[v][e] = subs[v]^e, built lazily.
  std::vector<std::vector<TruncatedSeries>> powers(subs.size());
  auto power_of = [&](std::size_t v, int e) -> const TruncatedSeries& {
    auto& table = powers[v];
    if (table.empty()) table.push_back(TruncatedSeries::constant(target_nvars, maxdeg, 1.0));
    while (static_cast<int>(table.size()) <= e) table.push_back(mul(table.back(), subs[v].truncated(maxdeg)));
    return table[static_cast<std::size_t>(e)];
  };
  for (const auto& [k, c] : a.terms()) {
    // Every substituted series starts at degree >= 1, so monomials above the
    // target degree cannot contribute.
    if (k.degree() > maxdeg) break;
    TruncatedSeries term = TruncatedSeries::constant(target_nvars, maxdeg, c);
    for (int v = 0; v < a.nvars(); ++v) {
      if (k[v] == 0) continue;
      term = mul(term, power_of(static_cast<std::size_t>(v), k[v]));
    }
    r += term;
  }
  return r;
}

TruncatedSeries invert(const TruncatedSeries& a) {
  const Complex c0 = a.constant_term();
  if (c0 == Complex{}) throw Error(ErrorKind::ZeroConstantTerm, "series is not invertible");
  // 1/a = (1/c0) * sum_k (-x)^k with x = a/c0 - 1, which has no constant term.
  TruncatedSeries x = scale(a, 1.0 / c0);
  x.add_to(MultiIndex(a.nvars()), -1.0);
  TruncatedSeries neg_x = -x;
  TruncatedSeries result = TruncatedSeries::constant(a.nvars(), a.maxdeg(), 1.0);
  TruncatedSeries term = result;
  for (int k = 1; k <= a.maxdeg(); ++k) {
    term = mul(term, neg_x);
    if (term.empty()) break;
    result += term;
  }
  result *= 1.0 / c0;
  return result;
}

Complex eval(const TruncatedSeries& a, std::span<const Complex> point) {
  if (static_cast<int>(point.size()) != a.nvars()) {
    throw Error(ErrorKind::VariableMismatch, "evaluation point has " + std::to_string(point.size()) + " coordinates");
  }
  const int top = std::max(a.maxdeg(), 0);
  std::vector<std::vector<Complex>> pw(point.size(), std::vector<Complex>(static_cast<std::size_t>(top) + 1));
  for (std::size_t v = 0; v < point.size(); ++v) {
    pw[v][0] = 1.0;
    for (int e = 1; e <= top; ++e) pw[v][static_cast<std::size_t>(e)] = pw[v][static_cast<std::size_t>(e - 1)] * point[v];
  }
  Complex sum{};
  for (const auto& [k, c] : a.terms()) {
    Complex m = c;
    for (int v = 0; v < a.nvars(); ++v)
      if (k[v] != 0) m *= pw[static_cast<std::size_t>(v)][static_cast<std::size_t>(k[v])];
    sum += m;
  }
  return sum;
}

TruncatedSeries embed(const TruncatedSeries& a, int nvars, std::span<const int> targets) {
  if (static_cast<int>(targets.size()) != a.nvars()) throw Error(ErrorKind::VariableMismatch, "embedding map size");
  for (int t : targets)
    if (t < 0 || t >= nvars) throw Error(ErrorKind::BadVariable, "embedding target " + std::to_string(t));
  TruncatedSeries r(nvars, a.maxdeg());
  for (const auto& [k, c] : a.terms()) {
    MultiIndex m(nvars);
    for (int v = 0; v < a.nvars(); ++v) {
      const int t = targets[static_cast<std::size_t>(v)];
      m.set(t, m[t] + k[v]);
    }
    r.add_to(m, c);
  }
  return r;
}

TruncatedSeries conj_coeffs(const TruncatedSeries& a) {
  TruncatedSeries r = a;
  for (const auto& [k, c] : a.terms()) r.set(k, std::conj(c));
  return r;
}

double max_abs_diff(const TruncatedSeries& a, const TruncatedSeries& b) {
  return sub(a, b).sup_norm();
}

HGradedSeries::HGradedSeries(std::vector<TruncatedSeries> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.nvars() != terms_.front().nvars()) throw Error(ErrorKind::VariableMismatch, "h-graded terms disagree on variables");
  }
}

std::vector<MultiIndex> multi_indices_of_degree(int nvars, int degree) {
  std::vector<MultiIndex> out;
  if (nvars == 0) {
    if (degree == 0) out.emplace_back(0);
    return out;
  }
  std::vector<int> e(static_cast<std::size_t>(nvars), 0);
  // Compositions of `degree` into nvars parts.
  auto rec = [&](auto&& self, int var, int left) -> void {
    if (var == nvars - 1) {
      e[static_cast<std::size_t>(var)] = left;
      out.emplace_back(std::span<const int>(e));
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[static_cast<std::size_t>(var)] = k;
      self(self, var + 1, left - k);
    }
  };
  rec(rec, 0, degree);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bergman
