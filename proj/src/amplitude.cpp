#include "bergman/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bergman {

namespace {

// <u_j v_k> = kPairing * h * (B^-1)_{kj}, fixed by the Gaussian calibration.
constexpr double kPairing = -0.5;

int bidegree_gap(const MultiIndex& fast, int n, int& p) {
  int du = 0;
  int dv = 0;
  for (int j = 0; j < n; ++j) {
    du += fast[j];
    dv += fast[n + j];
  }
  p = du;
  return du - dv;
}

}  // namespace

double leading_normalization(int n) { return std::pow(std::numbers::pi / 2.0, n); }

ExpansionTermOps::ExpansionTermOps(const PhaseData& pd, int hmax) : n_(pd.n), hmax_(hmax) {
  const int m = pd.psi_degree();
  if (m < 2 * hmax + 2) {
    throw Error(ErrorKind::InsufficientDegree,
                "phase known to degree " + std::to_string(m) + ", order " + std::to_string(hmax) + " needs " +
                    std::to_string(2 * hmax + 2));
  }
  slow_maxdeg_ = m - 2;
  b_inverse_ = pd.b_inverse;
  c0_ = scale(invert(pd.det_b), leading_normalization(n_));

  const int nfast = 2 * n_;
  const int nslow = 2 * n_;
  const int wmax = 2 * hmax;
  exp_remainder_.assign(static_cast<std::size_t>(wmax) + 1, DisplacementSeries(nfast, nslow));
  exp_remainder_[0].add_to(MultiIndex(nfast), TruncatedSeries::constant(nslow, slow_maxdeg_, 1.0));

  // S_V = 2 R_{V+2} carries h-weight V/2.
  std::vector<DisplacementSeries> s(static_cast<std::size_t>(wmax) + 1, DisplacementSeries(nfast, nslow));
  for (int v = 1; v <= wmax; ++v) {
    DisplacementSeries part = pd.remainder.homogeneous_part(v + 2);
    DisplacementSeries doubled(nfast, nslow);
    for (const auto& [k, c] : part.terms()) doubled.add_to(k, scale(c, 2.0));
    s[static_cast<std::size_t>(v)] = std::move(doubled);
  }
  // Graded exponential: W E_W = sum_{V=1..W} V S_V E_{W-V}.
  for (int w = 1; w <= wmax; ++w) {
    const int slow_cap = slow_maxdeg_ - w;
    DisplacementSeries acc(nfast, nslow);
    for (int v = 1; v <= w; ++v) {
      const auto& sv = s[static_cast<std::size_t>(v)];
      if (sv.empty()) continue;
      DisplacementSeries prod = mul(sv, exp_remainder_[static_cast<std::size_t>(w - v)], 3 * w, slow_cap);
      for (const auto& [k, c] : prod.terms()) acc.add_to(k, scale(c, static_cast<double>(v) / w));
    }
    exp_remainder_[static_cast<std::size_t>(w)] = std::move(acc);
  }
}

const TruncatedSeries& ExpansionTermOps::wick(const MultiIndex& fast) const {
  if (auto it = wick_cache_.find(fast); it != wick_cache_.end()) return it->second;
  const int nslow = 2 * n_;
  int p = 0;
  TruncatedSeries value(nslow, slow_maxdeg_);
  if (bidegree_gap(fast, n_, p) == 0) {
    if (p == 0) {
      value = TruncatedSeries::constant(nslow, slow_maxdeg_, 1.0);
    } else {
      int j = 0;
      while (fast[j] == 0) ++j;
      MultiIndex rest = fast;
      rest.set(j, fast[j] - 1);
      for (int k = 0; k < n_; ++k) {
        const int mult = fast[n_ + k];
        if (mult == 0) continue;
        MultiIndex smaller = rest;
        smaller.set(n_ + k, mult - 1);
        // s_j pairs with one of the `mult` copies of t_k.
        value += scale(mul(b_inverse_(k, j), wick(smaller)), kPairing * mult);
      }
    }
  }
  return wick_cache_.emplace(fast, std::move(value)).first->second;
}

std::vector<TruncatedSeries> ExpansionTermOps::apply(const TruncatedSeries& f, int jmax) const {
  if (jmax > hmax_) throw Error(ErrorKind::InsufficientDegree, "requested order above the engine's hmax");
  if (f.nvars() != 2 * n_) throw Error(ErrorKind::VariableMismatch, "symbol must live in 2n variables");
  const DisplacementSeries fexp = fast_expansion(f, 2 * jmax);
  std::vector<TruncatedSeries> out;
  out.reserve(static_cast<std::size_t>(jmax) + 1);
  out.push_back(f.truncated(slow_maxdeg_));
  const int nfast = 2 * n_;
  for (int j = 1; j <= jmax; ++j) {
    const int target = std::min(f.maxdeg(), slow_maxdeg_) - 2 * j;
    // Collect sum of coefficient products per fast monomial before contracting.
    std::map<MultiIndex, TruncatedSeries> gathered;
    for (int d = 0; d <= 2 * j; ++d) {
      const auto& ew = exp_remainder_[static_cast<std::size_t>(2 * j - d)];
      if (ew.empty()) continue;
      for (const auto& [kf, cf] : fexp.terms()) {
        if (kf.degree() != d) continue;
        const TruncatedSeries cf_t = cf.truncated(target);
        for (const auto& [ke, ce] : ew.terms()) {
          const MultiIndex k = kf + ke;
          int p = 0;
          if (bidegree_gap(k, n_, p) != 0) continue;
          TruncatedSeries prod = mul(cf_t, ce.truncated(target));
          auto [it, inserted] = gathered.try_emplace(k, prod);
          if (!inserted) it->second += prod;
        }
      }
    }
    TruncatedSeries tj(nfast, target);
    for (const auto& [k, c] : gathered) tj += mul(c, wick(k).truncated(target));
    out.push_back(std::move(tj));
  }
  return out;
}

HGradedSeries formal_expansion(const PhaseData& pd, const HGradedSeries& u, int hmax) {
  for (int k = 0; k <= std::min(u.hmax(), hmax); ++k) {
    if (u[k].maxdeg() < 2 * (hmax - k) + 2) {
      throw Error(ErrorKind::InsufficientDegree,
                  "symbol term " + std::to_string(k) + " known to degree " + std::to_string(u[k].maxdeg()) + ", need " +
                      std::to_string(2 * (hmax - k) + 2));
    }
  }
  ExpansionTermOps ops(pd, hmax);
  const int nslow = 2 * pd.n;
  std::vector<TruncatedSeries> sums;
  for (int m = 0; m <= hmax; ++m) sums.emplace_back(nslow, pd.psi_degree() - 2 - 2 * m);
  for (int k = 0; k <= std::min(u.hmax(), hmax); ++k) {
    const auto t = ops.apply(u[k], hmax - k);
    for (int j = 0; j + k <= hmax; ++j) sums[static_cast<std::size_t>(j + k)] += t[static_cast<std::size_t>(j)];
  }
  std::vector<TruncatedSeries> out;
  for (auto& s : sums) out.push_back(mul(ops.c0(), s));
  return HGradedSeries(std::move(out));
}

Amplitude solve_amplitude(const PhaseData& pd, int order) {
  if (order < 0) throw Error(ErrorKind::InsufficientDegree, "negative amplitude order");
  if (pd.psi_degree() < 2 * order + 4) {
    throw Error(ErrorKind::InsufficientDegree, "weight known to degree " + std::to_string(pd.psi_degree()) +
                                                   ", amplitude order " + std::to_string(order) + " needs 2N+4 = " +
                                                   std::to_string(2 * order + 4));
  }
  ExpansionTermOps ops(pd, order);
  Amplitude a;
  a.n = pd.n;
  a.order = order;
  a.c0 = ops.c0();
  a.coeffs.push_back(invert(ops.c0()));
  // pending[m] accumulates sum_{j>=1} T_j a_{m-j}.
  std::vector<TruncatedSeries> pending;
  for (int m = 0; m <= order; ++m) pending.emplace_back(2 * pd.n, pd.psi_degree() - 2 - 2 * m);
  for (int k = 0; k < order; ++k) {
    const auto t = ops.apply(a.coeffs[static_cast<std::size_t>(k)], order - k);
    for (int j = 1; j + k <= order; ++j) pending[static_cast<std::size_t>(j + k)] += t[static_cast<std::size_t>(j)];
    a.coeffs.push_back(-pending[static_cast<std::size_t>(k + 1)]);
  }
  return a;
}

std::vector<double> normalized_growth(const Amplitude& a, double radius) {
  const int n = a.n;
  const int angles = n == 1 ? 48 : 12;
  const int dims = 2 * n;
  long total = 1;
  for (int d = 0; d < dims; ++d) total *= angles;
  std::vector<double> sups(a.coeffs.size(), 0.0);
  std::vector<Complex> pt(static_cast<std::size_t>(dims));
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (int d = 0; d < dims; ++d) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(rest % angles) / angles;
      rest /= angles;
      pt[static_cast<std::size_t>(d)] = std::polar(radius, ang);
    }
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) sups[k] = std::max(sups[k], std::abs(eval(a.coeffs[k], pt)));
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < sups.size(); ++k) {
    const double kk = k == 0 ? 1.0 : std::pow(static_cast<double>(k), static_cast<double>(k));
    out.push_back(std::pow(sups[k] / kk, 1.0 / (static_cast<double>(k) + 1.0)));
  }
  return out;
}

double estimate_growth(Amplitude& a, double radius) {
  const auto seq = normalized_growth(a, radius);
  a.growth_C = 2.0 * *std::max_element(seq.begin(), seq.end());
  return a.growth_C;
}

GrowthBand growth_band(const std::vector<double>& normalized, double factor) {
  GrowthBand band;
  if (normalized.empty()) return band;
  std::vector<double> sorted = normalized;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  band.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  band.lo = sorted.front();
  band.hi = sorted.back();
  band.within = band.hi <= factor * band.median && band.lo >= band.median / factor;
  return band;
}

Realization realize_fixed(const Amplitude& a, double h, int last_order) {
  const int last = std::clamp(last_order, 0, a.order);
  // Each a_k is summed as the polynomial it is stored as; the partial sum keeps
  // the precision of a_0 rather than that of the shortest term.
  const int top = a.coeffs.front().maxdeg();
  Realization r{a.coeffs.front(), last};
  double hk = 1.0;
  for (int k = 1; k <= last; ++k) {
    hk *= h;
    r.series += scale(a.coeffs[static_cast<std::size_t>(k)], hk).padded(top);
  }
  return r;
}

Realization realize(const Amplitude& a, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::ConfigInvalid, "h must be positive");
  if (!(a.growth_C > 0.0)) throw Error(ErrorKind::ConfigInvalid, "growth constant not estimated");
  const double cutoff = 1.0 / (a.growth_C * std::numbers::e * h);
  const int last = cutoff >= a.order ? a.order : static_cast<int>(std::floor(cutoff));
  return realize_fixed(a, h, last);
}

}  // namespace bergman
