#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cissifs/cissifs.hpp"

namespace fixtures {

using namespace cissifs;

inline IntMatrix mat(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  IntMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (auto x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline IfsSpec carpet() { return validate_line_ifs(3, {0, 1, 1, 2, 2, 3, 3, 4}, "carpet"); }
inline IfsSpec gasket() { return validate_line_ifs(2, {0, 1, 2}, "gasket"); }
inline IfsSpec x20() { return validate_line_ifs(2, {0, 1, 2, 4}, "x20"); }
inline IfsSpec unit_line() { return validate_line_ifs(2, {0, 1}, "unit"); }

inline IfsSpec overlap2d() {
  std::vector<IntVec> ts;
  for (std::int64_t a = 0; a < 3; ++a)
    for (std::int64_t b = 0; b < 3; ++b) ts.push_back({a, b});
  return validate_ifs(2, 2, ts, "overlap2d");
}

inline CodingFamily doubling() { return CodingFamily::from_matrices({mat({{2}})}); }

inline std::vector<IfsSpec> all_specs() { return {carpet(), gasket(), x20(), overlap2d()}; }

inline std::vector<IntMatrix> carpet_display() {
  return {mat({{1, 0}, {2, 2}}), mat({{2, 1}, {1, 2}}), mat({{2, 2}, {0, 1}})};
}

inline std::vector<IntMatrix> gasket_display() { return {mat({{1, 0}, {1, 1}}), mat({{1, 1}, {0, 1}})}; }

/// As printed, including B_1(2,3) = 2, whose column then sums to 5 > M = 4.
inline std::vector<IntMatrix> x20_display() {
  return {mat({{1, 0, 0, 0}, {1, 1, 1, 0}, {1, 0, 1, 1}, {0, 0, 1, 0}}),
          mat({{1, 1, 0, 0}, {0, 1, 1, 1}, {0, 1, 0, 2}, {0, 0, 0, 1}})};
}

inline std::vector<IntMatrix> overlap2d_display() {
  return {mat({{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}, {1, 1, 1, 1}}),
          mat({{1, 1, 0, 0}, {0, 1, 0, 0}, {1, 1, 1, 1}, {0, 1, 0, 1}}),
          mat({{1, 0, 1, 0}, {1, 1, 1, 1}, {0, 0, 1, 0}, {0, 0, 1, 1}}),
          mat({{1, 1, 1, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}, {0, 0, 0, 1}})};
}

inline std::vector<IntVec> x20_uset() { return {{1, 0, 1, 0}, {0, 1, 0, 1}}; }

/// Brute-force count of length-n compositions, independent of the matrix
/// recursion. With the scale L^(n-1), S_{l1}...S_{ln} maps basic cell V onto
/// the cube with corner b_V + sum_k t_{lk} L^(n-k); that corner, read in base
/// L, names the target cell U and the digits theta_1..theta_n directly.
/// Returns counts keyed by digit word, each an N x N matrix indexed (U, V).
inline std::map<Word, IntMatrix> brute_force_products(const IfsSpec& spec, std::size_t n) {
  const BasicCells cells = basic_cells(spec);
  const std::size_t N = cells.size();
  const std::size_t M = spec.maps();
  const auto d = static_cast<std::size_t>(spec.dimension);
  std::int64_t Ln = 1;
  for (std::size_t i = 0; i < n; ++i) Ln *= spec.base;
  std::map<Word, IntMatrix> out;
  std::vector<std::size_t> seq(n, 0);
  while (true) {
    for (std::size_t v = 0; v < N; ++v) {
      IntVec corner = cells.cells[v];
      for (std::size_t k = 0; k < n; ++k) {
        std::int64_t scale = 1;
        for (std::size_t i = k + 1; i < n; ++i) scale *= spec.base;
        for (std::size_t j = 0; j < d; ++j) corner[j] += spec.translations[seq[k]][j] * scale;
      }
      IntVec u(d);
      std::vector<IntVec> digit_vecs(n, IntVec(d));
      for (std::size_t j = 0; j < d; ++j) {
        u[j] = corner[j] / Ln;
        std::int64_t rest = corner[j] % Ln;
        for (std::size_t k = n; k-- > 0;) {
          digit_vecs[k][j] = rest % spec.base;
          rest /= spec.base;
        }
      }
      Word w(n);
      for (std::size_t k = 0; k < n; ++k) w[k] = pack_digit(digit_vecs[k], spec.base);
      auto it = out.try_emplace(w, IntMatrix(N, N)).first;
      const auto ui = cells.index_of(u);
      if (!ui) throw std::logic_error("brute force: composition leaves the basic cells");
      it->second(*ui, v) += 1;
    }
    std::size_t pos = n;
    while (pos > 0 && ++seq[pos - 1] == M) seq[--pos] = 0;
    if (pos == 0) break;
  }
  return out;
}

/// Every word of the given length over `alphabet`, lexicographic.
inline std::vector<Word> all_words(std::size_t alphabet, std::size_t n) {
  std::vector<Word> out;
  Word w(n, 0);
  while (true) {
    out.push_back(w);
    std::size_t pos = n;
    while (pos > 0 && ++w[pos - 1] == alphabet) w[--pos] = 0;
    if (pos == 0) break;
  }
  return out;
}

}  // namespace fixtures
