#pragma once

#include <cstdint>
#include <vector>

#include "bergman/tseries.hpp"

namespace bergman {

// Additive-recurrence (Kronecker) low-discrepancy sequence with a seeded
// Cranley-Patterson shift.
class LowDiscrepancy {
 public:
  LowDiscrepancy(int dim, std::uint64_t seed);

  // Next point in [0,1)^dim.
  std::vector<double> next();

 private:
  std::vector<double> alpha_;
  std::vector<double> state_;
};

using Point = std::vector<Complex>;

// `count` tuples of `groups` points, each point in the Euclidean ball of
// `radius` around `center` in C^n. Deterministic for a fixed seed.
std::vector<std::vector<Point>> sample_ball_tuples(int n, int groups, double radius, int count, std::uint64_t seed,
                                                   const Point& center = {});

double squared_distance(const Point& a, const Point& b);

}  // namespace bergman
