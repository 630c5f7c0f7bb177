#pragma once

#include <vector>

#include "matchwalk.hpp"

namespace pinned {

using namespace matchwalk;

struct Pinned {
  const char* name;
  Graph graph;
  std::size_t k;
  std::size_t omega_size;
  Rational linf;
  Rational m01;
  double lambda_max;
};

// Reference values for the bounded-degree family, produced once by
// exhaustive enumeration and kept fixed.
inline std::vector<Pinned> family() {
  return {
      {"cycle8", generators::cycle(8), 2, 20, Rational(1), Rational(-1, 3), 0.6},
      {"cycle8", generators::cycle(8), 3, 16, Rational(9, 5), Rational(-3, 5), 5.0 / 3},
      {"cycle12", generators::cycle(12), 2, 54, Rational(1), Rational(-1, 5), 1.0 / 3},
      {"cycle12", generators::cycle(12), 3, 112, Rational(1), Rational(-1, 3), 5.0 / 7},
      {"ladder4", generators::ladder(4), 2, 29, Rational(16, 15), Rational(-7, 23), 0.48016883669919763},
      {"ladder4", generators::ladder(4), 3, 26, Rational(61, 30), Rational(-11, 18), 1.2781373149233428},
      {"ladder7", generators::ladder(7), 2, 137, Rational(1), Rational(-8, 61), 0.19853218787932309},
      {"ladder7", generators::ladder(7), 3, 473, Rational(14737, 14271), Rational(-92, 393), 0.4054298755924961},
      {"petersen", generators::petersen(), 2, 75, Rational(1), Rational(-2, 13), 7.0 / 26},
      {"petersen", generators::petersen(), 3, 145, Rational(33, 29), Rational(-1, 4), 16.0 / 29},
      {"cube", generators::hypercube(3), 2, 42, Rational(1), Rational(-1, 5), 13.0 / 35},
      {"cube", generators::hypercube(3), 3, 44, Rational(61, 33), Rational(-1, 3), 9.0 / 11},
      {"prism7", generators::prism(7), 2, 168, Rational(1), Rational(-2, 19), 0.17434210526315796},
      {"prism7", generators::prism(7), 3, 644, Rational(1), Rational(-1, 6), 0.33152173913043492},
  };
}

}  // namespace pinned
