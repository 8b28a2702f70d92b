#pragma once

#include <random>

#include "burgers/basis.hpp"
#include "burgers/fem.hpp"

namespace testing {

inline burgers::FEVector random_fe(const burgers::Mesh& mesh, std::mt19937_64& rng, double lo = -1.0,
                                   double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  burgers::FEVector v(mesh);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return v;
}

inline double m_norm2(const burgers::FEVector& u, const burgers::BandedSymMatrix& mass) {
  return burgers::inner(u, u, mass);
}

}  // namespace testing
