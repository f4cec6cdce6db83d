#pragma once

// Brackets for the Lyapunov exponent and the lower spectral radius of a
// coding family, Monte-Carlo Lyapunov estimates, and the critical
// probabilities derived from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ifs.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "words.hpp"

namespace cissifs {

/// Raised when a family violates the allowability precondition of a bound.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Which functional and word length produced one side of a bracket.
struct BoundWitness {
  std::string functional;
  std::size_t length = 0;
  std::optional<Word> word;  // set when a single product attains the bound

  std::string describe() const {
    std::ostringstream os;
    os << functional << " @ length " << length;
    if (word) os << " word " << to_string(*word);
    return os.str();
  }
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  BoundWitness lo_witness;
  BoundWitness hi_witness;
  bool exact = false;

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(double a, double b) const { return lo <= a && b <= hi; }
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::size_t renorm_interval = 0;
  std::size_t batches = 0;
};

namespace detail {
template <class T>
void require_allowable(const std::vector<Matrix<T>>& mats, const char* who) {
  for (std::size_t i = 0; i < mats.size(); ++i)
    if (!is_allowable(mats[i]))
      throw PreconditionError(std::string(who) + ": matrix " + std::to_string(i) + " is not allowable");
}
}  // namespace detail

/// Lyapunov exponent bracket at word length m.
///
/// lo averages log(min column sum)/m over all words (superadditive), hi
/// averages log(entry sum)/m (subadditive); both are valid for every m.
template <class T>
Bracket lyapunov_bracket(const std::vector<Matrix<T>>& mats, std::size_t m) {
  if (m < 1) throw std::invalid_argument("lyapunov_bracket: m must be >= 1");
  detail::require_allowable(mats, "lyapunov_bracket");
  struct Acc {
    double lo = 0.0, hi = 0.0;
  };
  auto parts = enumerate_words(mats, m, Acc{}, [](Acc& a, const Word&, const Matrix<T>& p) {
    const double c = static_cast<double>(min_col_sum(p));
    if (c <= 0) throw PreconditionError("lyapunov_bracket: product with zero column");
    a.lo += std::log(c);
    a.hi += std::log(static_cast<double>(sum_norm(p)));
  });
  double lo = 0.0, hi = 0.0;
  for (const auto& a : parts) {
    lo += a.lo;
    hi += a.hi;
  }
  const double count = static_cast<double>(word_count(mats.size(), m));
  const double scale = 1.0 / (count * static_cast<double>(m));
  Bracket b;
  b.lo = lo * scale;
  b.hi = hi * scale;
  b.lo_witness = {"mean log min column sum", m, std::nullopt};
  b.hi_witness = {"mean log entry sum", m, std::nullopt};
  return b;
}

inline Bracket lyapunov_bracket(const CodingFamily& fam, std::size_t m) { return lyapunov_bracket(fam.matrices, m); }

/// Monte-Carlo Lyapunov exponent under i.i.d. uniform digits.
///
/// The run is split into `batches` independent chains, each seeded from its
/// own stream of `seed`; the estimate is total log growth over total steps and
/// the standard error comes from the spread of the batch means.
template <class T>
McEstimate lyapunov_mc(const std::vector<Matrix<T>>& mats, std::size_t steps, std::uint64_t seed,
                       std::size_t renorm_interval, std::size_t batches = 64) {
  if (mats.empty()) throw std::invalid_argument("lyapunov_mc: empty family");
  if (batches < 30) throw std::invalid_argument("lyapunov_mc: need at least 30 batches");
  if (steps < batches) throw std::invalid_argument("lyapunov_mc: steps must be >= batches");
  if (renorm_interval < 1) throw std::invalid_argument("lyapunov_mc: renorm_interval must be >= 1");
  double max_norm = 1.0;
  for (const auto& b : mats) max_norm = std::max(max_norm, static_cast<double>(sum_norm(b)));
  // entries between renormalisations stay below 2^512
  if (static_cast<double>(renorm_interval) * std::log2(max_norm) > 512.0)
    throw std::invalid_argument("lyapunov_mc: renorm_interval " + std::to_string(renorm_interval) +
                                " lets entries exceed 2^512; lower it");

  std::vector<RealMatrix> real;
  for (const auto& b : mats) real.push_back(b.template cast<double>());
  const std::size_t n = real.front().rows();
  const std::size_t k = real.size();

  struct Batch {
    double log_growth = 0.0;
    std::size_t len = 0;
  };
  auto results = parallel_map<Batch>(batches, [&](std::size_t b) {
    const std::size_t len = steps / batches + (b < steps % batches ? 1 : 0);
    SplitMix64 rng = SplitMix64::stream(seed, b);
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    RealMatrix p = RealMatrix::identity(n);
    double acc = 0.0;
    for (std::size_t s = 1; s <= len; ++s) {
      p = real[pick(rng)] * p;
      if (s % renorm_interval == 0 || s == len) {
        const double norm = sum_norm(p);
        if (!(norm > 0.0)) throw PreconditionError("lyapunov_mc: product collapsed to zero");
        acc += std::log(norm);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) p(i, j) /= norm;
      }
    }
    return Batch{acc, len};
  });

  double total = 0.0;
  for (const auto& r : results) total += r.log_growth;
  McEstimate est;
  est.steps = steps;
  est.seed = seed;
  est.renorm_interval = renorm_interval;
  est.batches = batches;
  est.value = total / static_cast<double>(steps);
  double mean = 0.0;
  for (const auto& r : results) mean += r.log_growth / static_cast<double>(r.len);
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (const auto& r : results) {
    const double d = r.log_growth / static_cast<double>(r.len) - mean;
    var += d * d;
  }
  var /= static_cast<double>(batches - 1);
  est.std_error = std::sqrt(var / static_cast<double>(batches));
  return est;
}

inline McEstimate lyapunov_mc(const CodingFamily& fam, std::size_t steps, std::uint64_t seed,
                              std::size_t renorm_interval = 32, std::size_t batches = 64) {
  return lyapunov_mc(fam.matrices, steps, seed, renorm_interval, batches);
}

/// Lower spectral radius bracket from all words of length 1..n.
///
/// hi: min over lengths of min(entry sum^(1/m), spectral radius^(1/m)).
/// lo: max over lengths of (min column sum)^(1/m), by supermultiplicativity.
/// For integer families, lo >= 1 together with a product of spectral radius
/// exactly 1 pins the value to 1.
template <class T>
Bracket lsr_bracket(const std::vector<Matrix<T>>& mats, std::size_t n) {
  if (n < 1) throw std::invalid_argument("lsr_bracket: n must be >= 1");
  detail::require_allowable(mats, "lsr_bracket");
  struct Acc {
    double min_sum = std::numeric_limits<double>::infinity();
    Word sum_word;
    double min_rho = std::numeric_limits<double>::infinity();
    Word rho_word;
    double min_col = std::numeric_limits<double>::infinity();
    Word col_word;
    std::optional<Word> unit_word;
  };
  Bracket b;
  b.lo = 0.0;
  b.hi = std::numeric_limits<double>::infinity();
  std::optional<Word> unit_witness;
  for (std::size_t m = 1; m <= n; ++m) {
    auto parts = enumerate_words(mats, m, Acc{}, [](Acc& a, const Word& w, const Matrix<T>& p) {
      const double s = static_cast<double>(sum_norm(p));
      if (s < a.min_sum) {
        a.min_sum = s;
        a.sum_word = w;
      }
      const double r = spectral_radius(p);
      if (r < a.min_rho) {
        a.min_rho = r;
        a.rho_word = w;
      }
      const double c = static_cast<double>(min_col_sum(p));
      if (c < a.min_col) {
        a.min_col = c;
        a.col_word = w;
      }
      if constexpr (std::is_same_v<T, std::int64_t>) {
        if (!a.unit_word && has_unit_spectral_radius(p)) a.unit_word = w;
      }
    });
    Acc best;
    for (const auto& a : parts) {
      if (a.min_sum < best.min_sum) {
        best.min_sum = a.min_sum;
        best.sum_word = a.sum_word;
      }
      if (a.min_rho < best.min_rho) {
        best.min_rho = a.min_rho;
        best.rho_word = a.rho_word;
      }
      if (a.min_col < best.min_col) {
        best.min_col = a.min_col;
        best.col_word = a.col_word;
      }
      if (!best.unit_word && a.unit_word) best.unit_word = a.unit_word;
    }
    const double inv = 1.0 / static_cast<double>(m);
    const double hs = m == 1 ? best.min_sum : std::pow(best.min_sum, inv);
    const double hr = m == 1 ? best.min_rho : std::pow(best.min_rho, inv);
    if (hs < b.hi) {
      b.hi = hs;
      b.hi_witness = {"entry sum^(1/m)", m, best.sum_word};
    }
    if (hr < b.hi) {
      b.hi = hr;
      b.hi_witness = {"spectral radius^(1/m)", m, best.rho_word};
    }
    const double lc = m == 1 ? best.min_col : std::pow(best.min_col, inv);
    if (lc > b.lo) {
      b.lo = lc;
      b.lo_witness = {"min column sum^(1/m)", m, best.col_word};
    }
    if (!unit_witness && best.unit_word) unit_witness = best.unit_word;
  }
  if (b.lo >= 1.0 && unit_witness) {
    b.lo = b.hi = 1.0;
    b.exact = true;
    b.hi_witness = {"spectral radius exactly 1", unit_witness->size(), unit_witness};
    b.lo_witness = {"allowable nonnegative integer products", 0, std::nullopt};
  }
  // single letters with integer min column sum equal to an integer entry sum
  if constexpr (std::is_integral_v<T>) {
    if (!b.exact && b.lo == b.hi && b.lo_witness.length == 1 && b.hi_witness.length == 1 &&
        b.hi_witness.functional == "entry sum^(1/m)")
      b.exact = true;
  }
  if (b.lo > b.hi) b.lo = b.hi;  // only reachable through floating rounding of equal bounds
  return b;
}

inline Bracket lsr_bracket(const CodingFamily& fam, std::size_t n) { return lsr_bracket(fam.matrices, n); }

struct CriticalProbabilities {
  double p_extinct = 0.0;      // 1/M
  Bracket lambda;              // Lyapunov exponent of B
  Bracket lsr;                 // lower spectral radius of B
  Bracket p_lebesgue;          // exp(-lambda)
  Bracket p_interior_empty;    // 1/lsr
};

/// Thresholds of the coin-tossing family: p > 1/M survives, p > exp(-lambda)
/// has positive Lebesgue measure, p < 1/lsr has empty interior.
inline CriticalProbabilities critical_probabilities(const CodingFamily& fam, std::size_t m, std::size_t n) {
  CriticalProbabilities cp;
  cp.p_extinct = 1.0 / static_cast<double>(fam.maps());
  cp.lambda = lyapunov_bracket(fam, m);
  cp.lsr = lsr_bracket(fam, n);
  cp.p_lebesgue.lo = std::exp(-cp.lambda.hi);
  cp.p_lebesgue.hi = std::min(1.0, std::exp(-cp.lambda.lo));
  cp.p_lebesgue.lo_witness = {"exp(-lambda.hi): " + cp.lambda.hi_witness.describe(), m, std::nullopt};
  cp.p_lebesgue.hi_witness = {"exp(-lambda.lo): " + cp.lambda.lo_witness.describe(), m, std::nullopt};
  cp.p_interior_empty.lo = 1.0 / cp.lsr.hi;
  cp.p_interior_empty.hi = 1.0 / cp.lsr.lo;
  cp.p_interior_empty.exact = cp.lsr.exact;
  cp.p_interior_empty.lo_witness = {"1/lsr.hi: " + cp.lsr.hi_witness.describe(), cp.lsr.hi_witness.length,
                                    cp.lsr.hi_witness.word};
  cp.p_interior_empty.hi_witness = {"1/lsr.lo: " + cp.lsr.lo_witness.describe(), cp.lsr.lo_witness.length,
                                    cp.lsr.lo_witness.word};
  return cp;
}

/// One row per word length: m, lambda.lo, lambda.hi.
inline std::string lyapunov_convergence_csv(const CodingFamily& fam, std::size_t max_m) {
  std::ostringstream os;
  os.precision(17);
  os << "m,lo,hi\n";
  for (std::size_t m = 1; m <= max_m; ++m) {
    Bracket b = lyapunov_bracket(fam, m);
    os << m << ',' << b.lo << ',' << b.hi << '\n';
  }
  return os.str();
}

}  // namespace cissifs
