#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ifs.hpp"
#include "parallel.hpp"

namespace cissifs {

/// Number of words of the given length over `alphabet` digits; throws past `limit`.
inline std::size_t word_count(std::size_t alphabet, std::size_t length, std::size_t limit = std::size_t(1) << 40) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < length; ++i) {
    if (n > limit / std::max<std::size_t>(alphabet, 1)) throw std::length_error("word enumeration exceeds budget");
    n *= alphabet;
  }
  return n;
}

/// Visits every word of `length` over the family's digits together with its
/// product B_{w1}...B_{wn}, in lexicographic order.
///
/// Work is split into chunks by a fixed-length prefix. Each chunk gets its own
/// copy of `init`, and the per-chunk accumulators are returned in lexicographic
/// chunk order, so reducing them front to back is independent of thread count.
/// Products share prefixes through a depth-first stack.
template <class T, class Acc, class Visit>
std::vector<Acc> enumerate_words(const std::vector<Matrix<T>>& mats, std::size_t length, const Acc& init,
                                 Visit visit) {
  if (mats.empty()) throw std::invalid_argument("empty matrix family");
  const std::size_t k = mats.size();
  (void)word_count(k, length);
  std::size_t prefix = 0, chunks = 1;
  while (prefix < length && chunks < 256) {
    chunks *= k;
    ++prefix;
  }
  const std::size_t n = mats.front().rows();

  return parallel_map<Acc>(chunks, [&](std::size_t chunk) {
    Acc acc = init;
    Word word(length, 0);
    std::size_t rest = chunk;
    for (std::size_t i = prefix; i-- > 0;) {
      word[i] = static_cast<Digit>(rest % k);
      rest /= k;
    }
    // stack[i] = product of the first i digits
    std::vector<Matrix<T>> stack(length + 1);
    stack[0] = Matrix<T>::identity(n);
    for (std::size_t i = 0; i < prefix; ++i) stack[i + 1] = stack[i] * mats[word[i]];
    if (prefix == length) {
      visit(acc, static_cast<const Word&>(word), static_cast<const Matrix<T>&>(stack[length]));
      return acc;
    }
    std::size_t depth = prefix;
    for (std::size_t i = prefix; i < length; ++i) word[i] = 0;
    // iterative DFS over the suffix digits
    while (true) {
      while (depth < length) {
        stack[depth + 1] = stack[depth] * mats[word[depth]];
        ++depth;
      }
      visit(acc, static_cast<const Word&>(word), static_cast<const Matrix<T>&>(stack[length]));
      // advance odometer on positions [prefix, length)
      std::size_t pos = length;
      while (pos > prefix) {
        --pos;
        if (++word[pos] < k) break;
        word[pos] = 0;
        if (pos == prefix) return acc;
      }
      depth = pos;
    }
  });
}

template <class Acc, class Visit>
std::vector<Acc> enumerate_words(const CodingFamily& fam, std::size_t length, const Acc& init, Visit visit) {
  return enumerate_words(fam.matrices, length, init, visit);
}

}  // namespace cissifs
