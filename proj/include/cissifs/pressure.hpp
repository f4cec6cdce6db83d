#pragma once

// Finite-level pressure P_n(q) = (1/n) log sum_{|w|=n} f(B_w)^q, its
// asymptote and right derivative, pinching/twisting certificates, and the
// interesting parameter interval (exp(-lambda), 1/lsr).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bounds.hpp"
#include "ifs.hpp"
#include "words.hpp"

namespace cissifs {

enum class Functional { sum_norm, spectral_radius };

inline const char* name(Functional f) {
  return f == Functional::sum_norm ? "sum_norm" : "spectral_radius";
}

/// log f(B_w) for every word of length n, in lexicographic order. Evaluating
/// the pressure at many q values reuses one enumeration.
class PressureSampler {
 public:
  PressureSampler(const CodingFamily& fam, std::size_t n, Functional f = Functional::sum_norm)
      : n_(n), functional_(f), log_alphabet_(std::log(static_cast<double>(fam.digits()))) {
    if (n < 1) throw std::invalid_argument("pressure: n must be >= 1");
    detail::require_allowable(fam.matrices, "pressure");
    auto parts = enumerate_words(fam, n, std::vector<double>{}, [f](std::vector<double>& acc, const Word&,
                                                                    const IntMatrix& p) {
      const double v = f == Functional::sum_norm ? static_cast<double>(sum_norm(p)) : spectral_radius(p);
      acc.push_back(std::log(v));
    });
    for (auto& part : parts) logs_.insert(logs_.end(), part.begin(), part.end());
  }

  /// log K + (1/n) log(mean_w f(B_w)^q). The mean form keeps P_n(0) = log K exactly.
  double operator()(double q) const {
    double top = -std::numeric_limits<double>::infinity();
    for (double l : logs_) top = std::max(top, q * l);
    double s = 0.0;
    for (double l : logs_) s += std::exp(q * l - top);
    const double mean = s / static_cast<double>(logs_.size());
    return log_alphabet_ + (top + std::log(mean)) / static_cast<double>(n_);
  }

  std::size_t length() const noexcept { return n_; }
  Functional functional() const noexcept { return functional_; }

 private:
  std::size_t n_;
  Functional functional_;
  double log_alphabet_;
  std::vector<double> logs_;
};

inline double pressure(const CodingFamily& fam, double q, std::size_t n, Functional f = Functional::sum_norm) {
  return PressureSampler(fam, n, f)(q);
}

struct PressureCurve {
  std::vector<std::pair<double, double>> samples;
  std::size_t n = 0;
  Functional norm = Functional::sum_norm;

  std::string csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "q,P\n";
    for (const auto& [q, p] : samples) os << q << ',' << p << '\n';
    return os.str();
  }
};

/// -40..4 in steps of 0.5 plus a few points close to 0.
inline std::vector<double> default_q_grid() {
  std::vector<double> g;
  for (int i = -80; i <= 8; ++i) g.push_back(0.5 * i);
  for (double d : {-0.1, -0.05, -0.01, 0.01, 0.05, 0.1}) g.push_back(d);
  std::sort(g.begin(), g.end());
  return g;
}

inline PressureCurve pressure_curve(const CodingFamily& fam, std::size_t n, const std::vector<double>& grid,
                                    Functional f = Functional::sum_norm) {
  PressureSampler sampler(fam, n, f);
  PressureCurve c;
  c.n = n;
  c.norm = f;
  for (double q : grid) c.samples.emplace_back(q, sampler(q));
  std::sort(c.samples.begin(), c.samples.end());
  return c;
}

struct AsymptoteEstimate {
  double value = 0.0;  // estimate of log lsr
  double q = 0.0;
  std::size_t n = 0;
  Functional functional = Functional::spectral_radius;
};

/// P_n(q)/q at the most negative grid point.
///
/// The default functional is the spectral radius: the entry sum of B_0^n grows
/// polynomially for unipotent letters, which biases the finite-n slope by
/// ~log(n)/n, while the spectral radius has no such term.
inline AsymptoteEstimate pressure_asymptote(const CodingFamily& fam, std::size_t n, double q_min = -40.0,
                                            Functional f = Functional::spectral_radius) {
  if (q_min > -20.0) throw std::invalid_argument("pressure_asymptote: q_min must be <= -20");
  PressureSampler sampler(fam, n, f);
  return AsymptoteEstimate{sampler(q_min) / q_min, q_min, n, f};
}

/// (P_n(h) - P_n(0))/h. The spectral radius is the default for the same
/// reason as in pressure_asymptote: the entry sum carries an O(log(n)/n) bias.
inline double pressure_right_derivative(const CodingFamily& fam, std::size_t n, double h = 0.01,
                                        Functional f = Functional::spectral_radius) {
  if (!(h > 0.0 && h <= 0.1)) throw std::invalid_argument("pressure_right_derivative: need 0 < h <= 0.1");
  PressureSampler sampler(fam, n, f);
  return (sampler(h) - sampler(0.0)) / h;
}

enum class Verdict { certified, undetermined, inapplicable };

inline const char* name(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::undetermined: return "undetermined";
    case Verdict::inapplicable: return "inapplicable";
  }
  return "unknown";
}

/// Pinching/twisting witnesses.
///
/// Pinching: a product A_1 whose eigenvalue moduli are pairwise distinct.
/// Twisting (sufficient eigenbasis form): a product A_2 with
/// det[A_2 V_I | V_J] != 0 for every pair of A_1-eigenvector index sets with
/// |I| + |J| = N, i.e. A_2 maps no invariant subspace of A_1 onto a subspace
/// meeting a complementary invariant subspace.
struct TypicalityCertificate {
  Verdict verdict = Verdict::undetermined;
  double tolerance = 1e-9;
  std::size_t search_len = 0;
  std::optional<Word> pinching_word;
  std::vector<double> eigen_moduli;  // descending
  std::optional<Word> twisting_word;
  std::vector<double> determinants;  // |det| per (I, J) pair, in enumeration order
  std::string note;
};

namespace detail {

struct EigenData {
  bool distinct = false;
  std::vector<double> moduli;
  Eigen::MatrixXd vectors;  // unit columns, sorted by descending modulus
};

inline EigenData distinct_real_eigen(const IntMatrix& a, double tol) {
  EigenData out;
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(a));
  if (es.info() != Eigen::Success) return out;
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const auto& ev = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(ev(static_cast<Eigen::Index>(x))) > std::abs(ev(static_cast<Eigen::Index>(y)));
  });
  const double scale = std::max(1.0, std::abs(ev(static_cast<Eigen::Index>(order[0]))));
  out.vectors = Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(order[i]);
    out.moduli.push_back(std::abs(ev(idx)));
    if (std::abs(ev(idx).imag()) > tol * scale) return out;
    Eigen::VectorXd v = es.eigenvectors().col(idx).real();
    out.vectors.col(static_cast<Eigen::Index>(i)) = v / v.norm();
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (out.moduli[i] - out.moduli[i + 1] <= tol * scale) return out;
  out.distinct = true;
  return out;
}

inline void subsets_of_size(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                            std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets_of_size(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// |det| of [normalised A V_I | V_J] for all index-set pairs with |I| + |J| = N.
inline std::vector<double> twisting_determinants(const IntMatrix& a2, const Eigen::MatrixXd& vecs) {
  const auto n = static_cast<std::size_t>(vecs.rows());
  Eigen::MatrixXd image = to_eigen(a2) * vecs;
  for (Eigen::Index c = 0; c < image.cols(); ++c) {
    const double nrm = image.col(c).norm();
    if (nrm > 0) image.col(c) /= nrm;
  }
  std::vector<double> dets;
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<std::vector<std::size_t>> left, right;
    std::vector<std::size_t> cur;
    subsets_of_size(n, k, 0, cur, left);
    subsets_of_size(n, n - k, 0, cur, right);
    for (const auto& in : left)
      for (const auto& jn : right) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Eigen::Index c = 0;
        for (auto i : in) m.col(c++) = image.col(static_cast<Eigen::Index>(i));
        for (auto j : jn) m.col(c++) = vecs.col(static_cast<Eigen::Index>(j));
        dets.push_back(std::abs(m.determinant()));
      }
  }
  return dets;
}

inline std::vector<Word> words_up_to(std::size_t alphabet, std::size_t max_len) {
  std::vector<Word> out;
  std::vector<Word> level{Word{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const auto& w : level)
      for (Digit d = 0; d < alphabet; ++d) {
        Word x = w;
        x.push_back(d);
        next.push_back(x);
      }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

}  // namespace detail

inline TypicalityCertificate typicality_check(const CodingFamily& fam, std::size_t search_len = 2,
                                              double tol = 1e-9) {
  using boost::multiprecision::cpp_int;
  TypicalityCertificate cert;
  cert.tolerance = tol;
  cert.search_len = search_len;
  if (fam.size() < 2) {
    cert.verdict = Verdict::inapplicable;
    cert.note = "single type: the pressure is affine";
    return cert;
  }
  for (std::size_t i = 0; i < fam.digits(); ++i) {
    if (exact_determinant(fam.matrices[i].cast<cpp_int>()) == 0) {
      cert.verdict = Verdict::inapplicable;
      cert.note = "matrix " + std::to_string(i) + " is singular";
      return cert;
    }
  }
  const auto words = detail::words_up_to(fam.digits(), search_len);
  for (const auto& w1 : words) {
    auto eig = detail::distinct_real_eigen(word_product(fam, w1), tol);
    if (!eig.distinct) continue;
    for (const auto& w2 : words) {
      auto dets = detail::twisting_determinants(word_product(fam, w2), eig.vectors);
      if (std::all_of(dets.begin(), dets.end(), [tol](double d) { return d > tol; })) {
        cert.verdict = Verdict::certified;
        cert.pinching_word = w1;
        cert.eigen_moduli = eig.moduli;
        cert.twisting_word = w2;
        cert.determinants = std::move(dets);
        return cert;
      }
    }
    if (!cert.pinching_word) {
      // keep the first pinching witness for the report even without a twist
      cert.pinching_word = w1;
      cert.eigen_moduli = eig.moduli;
    }
  }
  cert.verdict = Verdict::undetermined;
  cert.note = cert.pinching_word ? "pinching witness found but no twisting witness up to search length"
                                 : "no product with distinct eigenvalue moduli up to search length";
  return cert;
}

/// Recomputes gaps and determinants from the recorded words.
inline bool verify_typicality(const CodingFamily& fam, const TypicalityCertificate& cert) {
  if (cert.verdict != Verdict::certified) return false;
  if (!cert.pinching_word || !cert.twisting_word) return false;
  auto eig = detail::distinct_real_eigen(word_product(fam, *cert.pinching_word), cert.tolerance);
  if (!eig.distinct) return false;
  auto dets = detail::twisting_determinants(word_product(fam, *cert.twisting_word), eig.vectors);
  return std::all_of(dets.begin(), dets.end(), [&](double d) { return d > cert.tolerance; });
}

struct IntervalReport {
  double certified_lo = 0.0;  // exp(-lambda.lo)
  double certified_hi = 0.0;  // 1/lsr.hi
  double hull_lo = 0.0;       // exp(-lambda.hi)
  double hull_hi = 0.0;       // 1/lsr.lo
  bool nonempty_certified = false;
};

/// Relative slack that absorbs rounding of logs of exact integers.
inline constexpr double kBoundSlack = 1e-12;

inline IntervalReport interesting_interval(const CriticalProbabilities& cp) {
  IntervalReport r;
  r.certified_lo = cp.p_lebesgue.hi;
  r.certified_hi = cp.p_interior_empty.lo;
  r.hull_lo = cp.p_lebesgue.lo;
  r.hull_hi = cp.p_interior_empty.hi;
  r.nonempty_certified = r.certified_lo < r.certified_hi * (1.0 - kBoundSlack);
  return r;
}

inline IntervalReport interesting_interval(const CodingFamily& fam, std::size_t m, std::size_t n) {
  return interesting_interval(critical_probabilities(fam, m, n));
}

}  // namespace cissifs
