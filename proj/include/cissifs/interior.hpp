#pragma once

// Sufficient conditions for the random attractor to contain an interval.
//
// Given a set U of nonzero nonnegative integer vectors, condition 1 asks for a
// row of some product dominating a member of U. Condition 2* asks that at some
// level S every u in U, pushed through any product of expectation matrices,
// dominates gamma * v for some v in U with gamma > 1. With expectation
// matrices p*B that reduces to p^S * c(S) > 1, where
//
//   c(S) = min_{|w|=S} min_{u} max_{v} min_{j: v_j > 0} (u^T B_w)_j / v_j.
//
// Everything here is exact: integer products and rational comparisons.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ifs.hpp"
#include "words.hpp"

namespace cissifs {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using BigMatrix = Matrix<BigInt>;

/// Exact rational value of a finite double.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("exact_rational: non-finite value");
  int exp = 0;
  const double frac = std::frexp(x, &exp);
  // frac * 2^53 is an integer
  const auto mant = static_cast<long long>(std::ldexp(frac, 53));
  exp -= 53;
  Rational r{BigInt(mant)};
  if (exp > 0) r *= Rational(BigInt(1) << exp);
  if (exp < 0) r /= Rational(BigInt(1) << (-exp));
  return r;
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }

struct VectorFamily {
  std::vector<IntVec> vectors;

  static VectorFamily make(std::vector<IntVec> vs, std::size_t n) {
    if (vs.empty()) throw std::invalid_argument("vector family must be nonempty");
    for (const auto& v : vs) {
      if (v.size() != n)
        throw std::invalid_argument("vector family: length " + std::to_string(v.size()) + ", expected " +
                                    std::to_string(n));
      if (std::any_of(v.begin(), v.end(), [](auto x) { return x < 0; }))
        throw std::invalid_argument("vector family: negative entry");
      if (std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; }))
        throw std::invalid_argument("vector family: zero vector");
    }
    return VectorFamily{std::move(vs)};
  }

  std::size_t size() const noexcept { return vectors.size(); }
};

/// 0/1 vectors of length n with 1 <= popcount <= max_popcount, lexicographic.
/// A heuristic candidate pool for U; no search procedure is implied.
inline std::vector<IntVec> binary_vector_candidates(std::size_t n, std::size_t max_popcount) {
  std::vector<IntVec> out;
  if (n > 20) throw std::length_error("binary_vector_candidates: n too large");
  for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
    IntVec v(n);
    std::size_t pop = 0;
    for (std::size_t j = 0; j < n; ++j) {
      v[j] = (mask >> (n - 1 - j)) & 1;
      pop += static_cast<std::size_t>(v[j]);
    }
    if (pop <= max_popcount) out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<BigMatrix> big_matrices(const CodingFamily& fam) {
  std::vector<BigMatrix> out;
  for (const auto& b : fam.matrices) out.push_back(b.cast<BigInt>());
  return out;
}

namespace detail {
inline std::vector<BigInt> to_big(const IntVec& v) { return std::vector<BigInt>(v.begin(), v.end()); }

/// max over v in U of min_{j: v_j > 0} r_j / v_j, with its argmax; r is an integer row.
inline std::pair<Rational, std::size_t> best_ratio(const std::vector<BigInt>& r, const VectorFamily& uset) {
  Rational best = -1;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < uset.size(); ++k) {
    const auto& v = uset.vectors[k];
    Rational worst = -1;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] == 0) continue;
      Rational q(r[j], BigInt(v[j]));
      if (worst < 0 || q < worst) worst = q;
    }
    if (worst > best) {
      best = worst;
      arg = k;
    }
  }
  return {best, arg};
}
}  // namespace detail

struct Condition1Witness {
  Word word;
  std::size_t row = 0;
  std::size_t u_index = 0;
};

/// Shortest word (then lexicographic, then row, then u order) whose product
/// has a row dominating some u in U.
inline std::optional<Condition1Witness> condition1_check(const CodingFamily& fam, const VectorFamily& uset,
                                                         std::size_t max_s) {
  if (max_s < 1) throw std::invalid_argument("condition1_check: maxS must be >= 1");
  const auto mats = big_matrices(fam);
  for (std::size_t s = 1; s <= max_s; ++s) {
    auto parts = enumerate_words(mats, s, std::optional<Condition1Witness>{},
                                 [&](std::optional<Condition1Witness>& hit, const Word& w, const BigMatrix& p) {
                                   if (hit) return;
                                   for (std::size_t row = 0; row < p.rows(); ++row)
                                     for (std::size_t k = 0; k < uset.size(); ++k) {
                                       const auto& u = uset.vectors[k];
                                       bool dominates = true;
                                       for (std::size_t j = 0; j < u.size() && dominates; ++j)
                                         dominates = p(row, j) >= u[j];
                                       if (dominates) {
                                         hit = Condition1Witness{w, row, k};
                                         return;
                                       }
                                     }
                                 });
    for (auto& h : parts)
      if (h) return h;
  }
  return std::nullopt;
}

inline bool verify_condition1(const CodingFamily& fam, const VectorFamily& uset, const Condition1Witness& w) {
  if (w.u_index >= uset.size() || w.row >= fam.size() || w.word.empty()) return false;
  const IntMatrix p = word_product(fam, w.word);
  const auto& u = uset.vectors[w.u_index];
  for (std::size_t j = 0; j < u.size(); ++j)
    if (p(w.row, j) < u[j]) return false;
  return true;
}

inline constexpr std::size_t kNoChoice = static_cast<std::size_t>(-1);

/// c(S) together with the v chosen for every (word, u); choices are indexed
/// word_rank * |U| + u_index with words in lexicographic order.
struct Condition2StarResult {
  std::size_t S = 0;
  Rational c = 0;
  std::vector<std::size_t> choices;
  Word argmin_word;
  std::size_t argmin_u = 0;

  /// Condition 2* holds at probability p iff p^S c(S) > 1.
  bool holds_at(const Rational& p) const {
    Rational ps = 1;
    for (std::size_t i = 0; i < S; ++i) ps *= p;
    return ps * c > 1;
  }
};

inline Condition2StarResult condition2star_constant(const CodingFamily& fam, const VectorFamily& uset,
                                                    std::size_t S) {
  for (const auto& v : uset.vectors)
    if (v.size() != fam.size()) throw std::invalid_argument("vector family length does not match N");
  struct Acc {
    Rational c = -1;
    Word word;
    std::size_t u = 0;
    std::vector<std::size_t> choices;
  };
  const auto mats = big_matrices(fam);
  auto parts = enumerate_words(mats, S, Acc{}, [&](Acc& a, const Word& w, const BigMatrix& p) {
    for (std::size_t k = 0; k < uset.size(); ++k) {
      auto r = row_times(detail::to_big(uset.vectors[k]), p);
      auto [ratio, arg] = detail::best_ratio(r, uset);
      a.choices.push_back(ratio > 0 ? arg : kNoChoice);
      if (ratio < 0) ratio = 0;
      if (a.c < 0 || ratio < a.c) {
        a.c = ratio;
        a.word = w;
        a.u = k;
      }
    }
  });
  Condition2StarResult res;
  res.S = S;
  res.c = -1;
  for (auto& a : parts) {
    res.choices.insert(res.choices.end(), a.choices.begin(), a.choices.end());
    if (res.c < 0 || a.c < res.c) {
      res.c = a.c;
      res.argmin_word = a.word;
      res.argmin_u = a.u;
    }
  }
  return res;
}

/// Condition 2 witness: for every word w of length S a nonnegative
/// |U| x |U| matrix A_w with U M_w >= A_w U and every row sum > 1.
struct Condition2Family {
  std::size_t S = 0;
  Rational p = 0;
  std::vector<Matrix<Rational>> a;  // lexicographic word order
  Rational min_row_sum = 0;         // gamma'
};

namespace detail {
/// Row of A for target r (already scaled by p^S): greedy in the given v order.
inline std::vector<Rational> greedy_row(std::vector<Rational> r, const VectorFamily& uset) {
  std::vector<Rational> a(uset.size(), Rational(0));
  for (std::size_t k = 0; k < uset.size(); ++k) {
    const auto& v = uset.vectors[k];
    Rational take = -1;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] == 0) continue;
      Rational q = r[j] / v[j];
      if (take < 0 || q < take) take = q;
    }
    if (take <= 0) continue;
    a[k] = take;
    for (std::size_t j = 0; j < v.size(); ++j) r[j] -= take * v[j];
  }
  return a;
}

inline Rational row_sum(const std::vector<Rational>& a) {
  Rational s = 0;
  for (const auto& x : a) s += x;
  return s;
}
}  // namespace detail

/// Builds A_w row by row: greedy over U in its given (lexicographic) order,
/// or the single best v if that has the larger row sum. Returns the family
/// only when every row sum exceeds 1.
inline std::optional<Condition2Family> condition2_matrix_check(const CodingFamily& fam, const VectorFamily& uset,
                                                               std::size_t S, const Rational& p) {
  Rational ps = 1;
  for (std::size_t i = 0; i < S; ++i) ps *= p;
  const auto mats = big_matrices(fam);
  const std::size_t m = uset.size();
  struct Acc {
    std::vector<Matrix<Rational>> a;
    Rational min_sum = -1;
  };
  auto parts = enumerate_words(mats, S, Acc{}, [&](Acc& acc, const Word&, const BigMatrix& prod) {
    Matrix<Rational> a(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      auto r = row_times(detail::to_big(uset.vectors[i]), prod);
      std::vector<Rational> target(r.size());
      for (std::size_t j = 0; j < r.size(); ++j) target[j] = ps * Rational(r[j]);
      auto greedy = detail::greedy_row(target, uset);
      auto [ratio, arg] = detail::best_ratio(r, uset);
      std::vector<Rational> single(m, Rational(0));
      if (ratio > 0) single[arg] = ps * ratio;
      const auto& row = detail::row_sum(single) > detail::row_sum(greedy) ? single : greedy;
      for (std::size_t k = 0; k < m; ++k) a(i, k) = row[k];
      const Rational s = detail::row_sum(row);
      if (acc.min_sum < 0 || s < acc.min_sum) acc.min_sum = s;
    }
    acc.a.push_back(std::move(a));
  });
  Condition2Family out;
  out.S = S;
  out.p = p;
  out.min_row_sum = -1;
  for (auto& part : parts) {
    if (out.min_row_sum < 0 || part.min_sum < out.min_row_sum) out.min_row_sum = part.min_sum;
    for (auto& a : part.a) out.a.push_back(std::move(a));
  }
  if (out.min_row_sum <= 1) return std::nullopt;
  return out;
}

/// Checks U M_w >= A_w U exactly for every word and that all row sums exceed 1.
inline bool verify_condition2(const CodingFamily& fam, const VectorFamily& uset, const Condition2Family& f) {
  const auto mats = big_matrices(fam);
  if (f.a.size() != word_count(fam.digits(), f.S)) return false;
  Rational ps = 1;
  for (std::size_t i = 0; i < f.S; ++i) ps *= f.p;
  const std::size_t m = uset.size(), n = fam.size();
  // lexicographic order, so each word lines up with its A_w
  Word w(f.S, 0);
  for (std::size_t rank = 0; rank < f.a.size(); ++rank) {
    const BigMatrix prod = word_product(mats, w);
    const auto& a = f.a[rank];
    for (std::size_t i = 0; i < m; ++i) {
      Rational s = 0;
      for (std::size_t k = 0; k < m; ++k) {
        if (a(i, k) < 0) return false;
        s += a(i, k);
      }
      if (s <= 1) return false;
      auto r = row_times(detail::to_big(uset.vectors[i]), prod);
      for (std::size_t j = 0; j < n; ++j) {
        Rational rhs = 0;
        for (std::size_t k = 0; k < m; ++k) rhs += a(i, k) * uset.vectors[k][j];
        if (ps * Rational(r[j]) < rhs) return false;
      }
    }
    for (std::size_t pos = f.S; pos-- > 0;) {
      if (++w[pos] < fam.digits()) break;
      w[pos] = 0;
    }
  }
  return true;
}

/// Everything needed to replay an interior-existence claim.
struct InteriorCertificate {
  std::optional<Condition1Witness> condition1;
  bool condition1b_assumed = true;  // deterministic attractor meets the cell interior; not computed
  std::size_t S = 0;
  Rational c = 0;
  double p_hat = 1.0;
  std::vector<std::size_t> choices;
  VectorFamily uset;
  std::vector<Rational> c_by_level;  // c(1..maxS)
};

/// c^(-1/S) nudged upward so the floating value never undercuts the exact one.
inline double conservative_root(const Rational& c, std::size_t S) {
  const double v = std::exp(-std::log(to_double(c)) / static_cast<double>(S));
  return std::nextafter(std::nextafter(v, 2.0), 2.0);
}

/// p_hat = min over S <= maxS with c(S) > 1 of c(S)^(-1/S), provided
/// condition 1 also has a witness. Above p_hat the random attractor contains
/// an interval almost surely on non-extinction.
inline std::optional<InteriorCertificate> critical_p_interior(const CodingFamily& fam, const VectorFamily& uset,
                                                              std::size_t max_s,
                                                              std::vector<Rational>* c_values = nullptr) {
  if (max_s < 1) throw std::invalid_argument("critical_p_interior: maxS must be >= 1");
  std::optional<InteriorCertificate> best;
  std::vector<Rational> cs;
  std::optional<Condition2StarResult> best_c;
  double best_p = 2.0;
  for (std::size_t s = 1; s <= max_s; ++s) {
    auto res = condition2star_constant(fam, uset, s);
    cs.push_back(res.c);
    if (res.c > 1) {
      const double p = conservative_root(res.c, s);
      if (p < best_p) {
        best_p = p;
        best_c = std::move(res);
      }
    }
  }
  if (c_values) *c_values = cs;
  if (!best_c) return std::nullopt;
  auto c1 = condition1_check(fam, uset, max_s);
  if (!c1) return std::nullopt;
  InteriorCertificate cert;
  cert.condition1 = c1;
  cert.S = best_c->S;
  cert.c = best_c->c;
  cert.p_hat = best_p;
  cert.choices = std::move(best_c->choices);
  cert.uset = uset;
  cert.c_by_level = std::move(cs);
  return cert;
}

/// Replays an interior certificate: condition 1 witness, every recorded
/// choice u^T B_w >= c v, c(S) recomputed exactly, and p_hat consistent.
inline bool verify_interior_certificate(const CodingFamily& fam, const InteriorCertificate& cert) {
  if (!cert.condition1 || !verify_condition1(fam, cert.uset, *cert.condition1)) return false;
  if (cert.c <= 1) return false;
  const auto mats = big_matrices(fam);
  const std::size_t m = cert.uset.size();
  if (cert.choices.size() != word_count(fam.digits(), cert.S) * m) return false;
  Word w(cert.S, 0);
  for (std::size_t rank = 0; rank * m < cert.choices.size(); ++rank) {
    const BigMatrix prod = word_product(mats, w);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t v_index = cert.choices[rank * m + k];
      if (v_index >= m) return false;
      auto r = row_times(detail::to_big(cert.uset.vectors[k]), prod);
      const auto& v = cert.uset.vectors[v_index];
      for (std::size_t j = 0; j < v.size(); ++j)
        if (Rational(r[j]) < cert.c * v[j]) return false;
    }
    for (std::size_t pos = cert.S; pos-- > 0;) {
      if (++w[pos] < fam.digits()) break;
      w[pos] = 0;
    }
  }
  if (condition2star_constant(fam, cert.uset, cert.S).c != cert.c) return false;
  const double exact = std::exp(-std::log(to_double(cert.c)) / static_cast<double>(cert.S));
  return cert.p_hat >= exact && cert.p_hat - exact < 1e-12;
}

struct MinColumnCheck {
  bool applies = false;
  double growth = 0.0;       // max_m (min_w min column sum)^(1/m)
  double threshold_p = 1.0;  // 1/growth when applies
  std::size_t length = 0;
  Word word;
};

/// The all-ones special case: if min column sums of all length-m products
/// exceed 1 for some m <= n, condition 2 holds with U = {(1,...,1)} for
/// p > 1/growth.
inline MinColumnCheck min_column_sum_check(const CodingFamily& fam, std::size_t n) {
  if (n < 1) throw std::invalid_argument("min_column_sum_check: n must be >= 1");
  MinColumnCheck out;
  for (std::size_t m = 1; m <= n; ++m) {
    struct Acc {
      std::int64_t min = -1;
      Word word;
    };
    auto parts = enumerate_words(fam, m, Acc{}, [](Acc& a, const Word& w, const IntMatrix& p) {
      const auto c = min_col_sum(p);
      if (a.min < 0 || c < a.min) {
        a.min = c;
        a.word = w;
      }
    });
    Acc best;
    for (const auto& a : parts)
      if (best.min < 0 || a.min < best.min) best = a;
    const double g = m == 1 ? static_cast<double>(best.min)
                            : std::pow(static_cast<double>(best.min), 1.0 / static_cast<double>(m));
    if (best.min >= 2 && g > out.growth) {
      out.applies = true;
      out.growth = g;
      out.threshold_p = 1.0 / g;
      out.length = m;
      out.word = best.word;
    }
  }
  return out;
}

}  // namespace cissifs
