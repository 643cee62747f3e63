#include "bergman/sampling.hpp"

#include <cmath>
#include <random>

namespace bergman {

LowDiscrepancy::LowDiscrepancy(int dim, std::uint64_t seed)
    : alpha_(static_cast<std::size_t>(dim)), state_(static_cast<std::size_t>(dim)) {
  // Generalized golden ratio: the positive root of x^(d+1) = x + 1.
  double g = 2.0;
  for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / (dim + 1.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < dim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    alpha_[k] = std::fmod(std::pow(1.0 / g, i + 1.0), 1.0);
    state_[k] = unit(rng);
  }
}

std::vector<double> LowDiscrepancy::next() {
  for (std::size_t k = 0; k < state_.size(); ++k) {
    state_[k] += alpha_[k];
    state_[k] -= std::floor(state_[k]);
  }
  return state_;
}

std::vector<std::vector<Point>> sample_ball_tuples(int n, int groups, double radius, int count, std::uint64_t seed,
                                                   const Point& center) {
  LowDiscrepancy seq(2 * n * groups, seed);
  std::vector<std::vector<Point>> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    const auto u = seq.next();
    std::vector<Point> tuple;
    bool inside = true;
    for (int g = 0; g < groups && inside; ++g) {
      Point p(static_cast<std::size_t>(n));
      double r2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const auto base = static_cast<std::size_t>(2 * n * g + 2 * j);
        const double re = (2.0 * u[base] - 1.0) * radius;
        const double im = (2.0 * u[base + 1] - 1.0) * radius;
        r2 += re * re + im * im;
        p[static_cast<std::size_t>(j)] = {re, im};
        if (!center.empty()) p[static_cast<std::size_t>(j)] += center[static_cast<std::size_t>(j)];
      }
      inside = r2 <= radius * radius;
      tuple.push_back(std::move(p));
    }
    if (inside) out.push_back(std::move(tuple));
  }
  return out;
}

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
  return s;
}

}  // namespace bergman
