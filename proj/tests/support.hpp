#pragma once

#include <doctest.h>

#include <random>

#include "bergman/oracle.hpp"

namespace test {

using namespace bergman;

template <class F>
void expect_error(F&& f, ErrorKind kind) {
  try {
    f();
    FAIL("expected " << to_string(kind));
  } catch (const Error& e) {
    CHECK_MESSAGE(e.kind() == kind, e.what());
  }
}

// |x|^2 lambda in one variable, (x, conj x) storage.
inline TruncatedSeries quadratic_phi(double lambda, int maxdeg) {
  TruncatedSeries phi(2, maxdeg);
  phi.set(MultiIndex{1, 1}, lambda);
  return phi;
}

// |x|^2 / 2 + eps x^2 conj(x)^2
inline TruncatedSeries quartic_phi(double eps, int maxdeg) {
  TruncatedSeries phi = quadratic_phi(0.5, maxdeg);
  phi.set(MultiIndex{2, 2}, eps);
  return phi;
}

inline Weight weight_of(const TruncatedSeries& phi, double trust = 1.0) { return validate_weight(phi, {0.0}, trust); }

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return {d(rng), d(rng)};
}

inline TruncatedSeries random_series(std::mt19937_64& rng, int nvars, int maxdeg, bool constant = true) {
  TruncatedSeries s(nvars, maxdeg);
  for (int d = constant ? 0 : 1; d <= maxdeg; ++d) {
    for (const auto& m : multi_indices_of_degree(nvars, d)) s.set(m, random_complex(rng));
  }
  return s;
}

}  // namespace test
