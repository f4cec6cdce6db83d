// Builds the gasket projection in code and prints its critical probabilities.

#include <iostream>

#include "cissifs/cissifs.hpp"

int main() {
  using namespace cissifs;
  const IfsSpec gasket = validate_line_ifs(2, {0, 1, 2});
  const CodingFamily fam = coding_matrices(gasket);
  for (std::size_t i = 0; i < fam.digits(); ++i) std::cout << "B_" << i << " = " << fam[i] << '\n';

  const auto cp = critical_probabilities(fam, 14, 8);
  std::cout << "extinction threshold 1/M = " << cp.p_extinct << '\n';
  std::cout << "positive measure above p in [" << cp.p_lebesgue.lo << ", " << cp.p_lebesgue.hi << "]\n";
  std::cout << "empty interior below 1/lsr = " << cp.p_interior_empty.lo << (cp.lsr.exact ? " (exact)" : "") << '\n';

  const auto r = simulate_tree(gasket, 0.9, 12, 7);
  if (auto dim = dimension_estimate(r, gasket.base)) std::cout << "dimension estimate at p = 0.9: " << *dim << '\n';
}
