#pragma once

// Integer self-similar IFS: validation, basic cells and coding matrices.
//
// An IFS here is a family of M maps x -> x/L + t_i on R^d with integer
// translations. Basic cells are the level -1 L-adic cubes [b*L, (b+1)*L]^d
// that carry natural measure. Coding matrix B_theta(U, V) counts the maps
// sending basic cell V onto the digit-theta sub-cube of basic cell U.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace cissifs {

using IntVec = std::vector<std::int64_t>;
using Digit = std::uint32_t;
using Word = std::vector<Digit>;

inline std::string to_string(const Word& w) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  os << ')';
  return os.str();
}

enum class IfsError {
  bad_dimension,
  base_too_small,
  too_few_maps,
  dimension_mismatch,
  negative_translation,
  missing_origin,
  coordinate_min_not_zero,
  coordinate_max_mismatch,
  not_divisible,
};

inline const char* name(IfsError e) {
  switch (e) {
    case IfsError::bad_dimension: return "bad_dimension";
    case IfsError::base_too_small: return "base_too_small";
    case IfsError::too_few_maps: return "too_few_maps";
    case IfsError::dimension_mismatch: return "dimension_mismatch";
    case IfsError::negative_translation: return "negative_translation";
    case IfsError::missing_origin: return "missing_origin";
    case IfsError::coordinate_min_not_zero: return "coordinate_min_not_zero";
    case IfsError::coordinate_max_mismatch: return "coordinate_max_mismatch";
    case IfsError::not_divisible: return "not_divisible";
  }
  return "unknown";
}

struct IfsValidationError : std::invalid_argument {
  IfsValidationError(IfsError kind, const std::string& what)
      : std::invalid_argument(std::string(name(kind)) + ": " + what), kind(kind) {}
  IfsError kind;
};

/// Thrown when an internal consistency invariant fails (a bug, not bad input).
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

struct IfsSpec {
  int dimension = 1;
  std::int64_t base = 2;
  std::vector<IntVec> translations;
  std::string name;

  std::size_t maps() const noexcept { return translations.size(); }

  /// Common coordinate maximum h; the attractor lies in [0, h*L/(L-1)]^d.
  std::int64_t height() const {
    std::int64_t h = 0;
    for (const auto& t : translations) h = std::max(h, *std::max_element(t.begin(), t.end()));
    return h;
  }

  /// Number of level -1 slots per axis, h/(L-1).
  std::int64_t slots() const { return height() / (base - 1); }

  /// L^d, the digit alphabet size.
  std::size_t digits() const {
    std::size_t k = 1;
    for (int i = 0; i < dimension; ++i) k *= static_cast<std::size_t>(base);
    return k;
  }

  friend bool operator==(const IfsSpec&, const IfsSpec&) = default;
};

/// Validates raw IFS data. Line systems (d = 1) get their translations sorted.
inline IfsSpec validate_ifs(int dimension, std::int64_t base, std::vector<IntVec> translations,
                            std::string label = {}) {
  if (dimension < 1) throw IfsValidationError(IfsError::bad_dimension, "dimension must be >= 1");
  if (base < 2) throw IfsValidationError(IfsError::base_too_small, "base L must be >= 2");
  if (translations.size() < 2)
    throw IfsValidationError(IfsError::too_few_maps, "need at least 2 maps, got " +
                                                         std::to_string(translations.size()));
  for (std::size_t i = 0; i < translations.size(); ++i) {
    const auto& t = translations[i];
    if (t.size() != static_cast<std::size_t>(dimension))
      throw IfsValidationError(IfsError::dimension_mismatch,
                               "translation " + std::to_string(i) + " has " + std::to_string(t.size()) +
                                   " coordinates, expected " + std::to_string(dimension));
    for (auto x : t)
      if (x < 0)
        throw IfsValidationError(IfsError::negative_translation,
                                 "translation " + std::to_string(i) + " has a negative coordinate");
  }

  std::int64_t h = 0;
  if (dimension == 1) {
    std::sort(translations.begin(), translations.end());
    if (translations.front()[0] != 0)
      throw IfsValidationError(IfsError::missing_origin, "smallest translation must be 0");
    h = translations.back()[0];
  } else {
    for (int j = 0; j < dimension; ++j) {
      std::int64_t lo = translations[0][j], hi = translations[0][j];
      for (const auto& t : translations) {
        lo = std::min(lo, t[j]);
        hi = std::max(hi, t[j]);
      }
      if (lo != 0)
        throw IfsValidationError(IfsError::coordinate_min_not_zero,
                                 "coordinate " + std::to_string(j) + " has minimum " + std::to_string(lo));
      if (j == 0) {
        h = hi;
      } else if (hi != h) {
        throw IfsValidationError(IfsError::coordinate_max_mismatch,
                                 "coordinate " + std::to_string(j) + " has maximum " + std::to_string(hi) +
                                     ", coordinate 0 has " + std::to_string(h));
      }
    }
  }
  if (h % (base - 1) != 0)
    throw IfsValidationError(IfsError::not_divisible, "L-1 = " + std::to_string(base - 1) +
                                                          " does not divide " + std::to_string(h));
  return IfsSpec{dimension, base, std::move(translations), std::move(label)};
}

/// Convenience for line systems.
inline IfsSpec validate_line_ifs(std::int64_t base, const std::vector<std::int64_t>& ts, std::string label = {}) {
  std::vector<IntVec> v;
  v.reserve(ts.size());
  for (auto t : ts) v.push_back({t});
  return validate_ifs(1, base, std::move(v), std::move(label));
}

struct BasicCells {
  std::vector<IntVec> cells;  // lexicographic

  std::size_t size() const noexcept { return cells.size(); }

  std::optional<std::size_t> index_of(const IntVec& b) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), b);
    if (it == cells.end() || *it != b) return std::nullopt;
    return static_cast<std::size_t>(it - cells.begin());
  }
};

namespace detail {
inline IntVec cell_step(const IntVec& b, const IntVec& t, std::int64_t base) {
  IntVec out(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) out[j] = (b[j] + t[j]) / base;
  return out;
}
}  // namespace detail

/// Forward closure of the zero cell under b -> floor((b + t_k)/L).
inline BasicCells basic_cells(const IfsSpec& spec) {
  std::set<IntVec> seen;
  std::vector<IntVec> frontier{IntVec(static_cast<std::size_t>(spec.dimension), 0)};
  seen.insert(frontier.front());
  while (!frontier.empty()) {
    IntVec b = std::move(frontier.back());
    frontier.pop_back();
    for (const auto& t : spec.translations) {
      IntVec c = detail::cell_step(b, t, spec.base);
      if (seen.insert(c).second) frontier.push_back(std::move(c));
    }
  }
  return BasicCells{std::vector<IntVec>(seen.begin(), seen.end())};
}

/// Lexicographic digit packing: the first coordinate is most significant.
inline Digit pack_digit(const IntVec& digit_vector, std::int64_t base) {
  std::int64_t theta = 0;
  for (auto d : digit_vector) theta = theta * base + d;
  return static_cast<Digit>(theta);
}

inline IntVec unpack_digit(Digit theta, std::int64_t base, int dimension) {
  IntVec out(static_cast<std::size_t>(dimension));
  std::int64_t rest = theta;
  for (int k = dimension - 1; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = rest % base;
    rest /= base;
  }
  return out;
}

/// The matrix family {B_theta}. Families built from an IFS also carry the
/// spec and basic cells; families built directly from matrices do not.
struct CodingFamily {
  std::vector<IntMatrix> matrices;
  std::optional<IfsSpec> spec;
  std::optional<BasicCells> basics;

  std::size_t digits() const noexcept { return matrices.size(); }
  std::size_t size() const noexcept { return matrices.empty() ? 0 : matrices.front().rows(); }

  /// Column mass sum_theta sum_U B_theta(U, V); constant in V for IFS families.
  std::int64_t column_mass(std::size_t v) const {
    std::int64_t s = 0;
    for (const auto& b : matrices)
      for (std::size_t u = 0; u < b.rows(); ++u) s += b(u, v);
    return s;
  }

  /// M, the number of maps (offspring per cylinder).
  std::int64_t maps() const {
    if (spec) return static_cast<std::int64_t>(spec->maps());
    return column_mass(0);
  }

  const IntMatrix& operator[](Digit theta) const { return matrices.at(theta); }

  static CodingFamily from_matrices(std::vector<IntMatrix> mats) {
    if (mats.empty()) throw std::invalid_argument("matrix family must be nonempty");
    const std::size_t n = mats.front().rows();
    if (n == 0) throw std::invalid_argument("matrices must be nonempty");
    for (const auto& m : mats) {
      if (m.rows() != n || m.cols() != n) throw std::invalid_argument("family matrices must be square and equal-sized");
      for (auto x : m.data())
        if (x < 0) throw std::invalid_argument("family matrices must be nonnegative");
    }
    return CodingFamily{std::move(mats), std::nullopt, std::nullopt};
  }
};

inline CodingFamily coding_matrices(const IfsSpec& spec) {
  BasicCells basics = basic_cells(spec);
  const std::size_t n = basics.size();
  std::vector<IntMatrix> mats(spec.digits(), IntMatrix(n, n));
  IntVec digit(static_cast<std::size_t>(spec.dimension));
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& t : spec.translations) {
      IntVec target(digit.size());
      for (std::size_t j = 0; j < digit.size(); ++j) {
        std::int64_t u = basics.cells[v][j] + t[j];
        target[j] = u / spec.base;
        digit[j] = u % spec.base;
      }
      auto idx = basics.index_of(target);
      if (!idx) throw ConsistencyError("image of a basic cell lands outside the basic cells");
      mats[pack_digit(digit, spec.base)](*idx, v) += 1;
    }
  }
  CodingFamily fam{std::move(mats), spec, std::move(basics)};
  const auto m = static_cast<std::int64_t>(spec.maps());
  for (std::size_t v = 0; v < n; ++v)
    if (fam.column_mass(v) != m) throw ConsistencyError("column-mass identity violated");
  return fam;
}

/// B_{w1} * ... * B_{wn}; the empty word gives the identity.
template <class T>
Matrix<T> word_product(const std::vector<Matrix<T>>& mats, const Word& word) {
  if (mats.empty()) throw std::invalid_argument("empty matrix family");
  Matrix<T> p = Matrix<T>::identity(mats.front().rows());
  for (Digit d : word) {
    if (d >= mats.size())
      throw std::out_of_range("digit " + std::to_string(d) + " out of range [0, " + std::to_string(mats.size()) + ")");
    p = p * mats[d];
  }
  return p;
}

inline IntMatrix word_product(const CodingFamily& fam, const Word& word) { return word_product(fam.matrices, word); }

struct GoodnessCertificate {
  std::vector<bool> allowable;
  std::optional<Word> positive_word;
  std::size_t max_length_searched = 0;

  bool all_allowable() const { return std::all_of(allowable.begin(), allowable.end(), [](bool b) { return b; }); }
  bool good() const { return all_allowable() && positive_word.has_value(); }
};

/// Exact allowability per matrix plus a breadth-first search over zero
/// patterns for a strictly positive product.
inline GoodnessCertificate goodness_check(const CodingFamily& fam, std::size_t max_len) {
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  GoodnessCertificate cert;
  cert.max_length_searched = max_len;
  for (const auto& b : fam.matrices) cert.allowable.push_back(is_allowable(b));

  using Pattern = std::vector<bool>;
  const std::size_t n = fam.size();
  auto pattern_of = [&](const IntMatrix& m) {
    Pattern p(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p[i * n + j] = m(i, j) > 0;
    return p;
  };
  auto times = [&](const Pattern& a, const Pattern& b) {
    Pattern c(n * n, false);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (a[i * n + k])
          for (std::size_t j = 0; j < n; ++j) c[i * n + j] = c[i * n + j] || b[k * n + j];
    return c;
  };
  auto positive = [](const Pattern& p) { return std::all_of(p.begin(), p.end(), [](bool b) { return b; }); };

  std::vector<Pattern> letters;
  for (const auto& b : fam.matrices) letters.push_back(pattern_of(b));

  std::map<Pattern, Word> seen;
  std::vector<std::pair<Pattern, Word>> level;
  for (Digit d = 0; d < letters.size(); ++d) {
    if (seen.emplace(letters[d], Word{d}).second) level.emplace_back(letters[d], Word{d});
  }
  for (std::size_t len = 1; len <= max_len && !level.empty(); ++len) {
    for (const auto& [p, w] : level)
      if (positive(p)) {
        cert.positive_word = w;
        return cert;
      }
    if (len == max_len) break;
    std::vector<std::pair<Pattern, Word>> next;
    for (const auto& [p, w] : level)
      for (Digit d = 0; d < letters.size(); ++d) {
        Pattern q = times(p, letters[d]);
        Word w2 = w;
        w2.push_back(d);
        if (seen.emplace(q, w2).second) next.emplace_back(std::move(q), std::move(w2));
      }
    level = std::move(next);
  }
  return cert;
}

}  // namespace cissifs
