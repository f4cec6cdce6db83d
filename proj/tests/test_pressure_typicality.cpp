#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace cissifs;
using namespace fixtures;

namespace {

double naive_pressure(const CodingFamily& fam, double q, std::size_t n) {
  double s = 0;
  for (const auto& w : all_words(fam.digits(), n))
    s += std::pow(static_cast<double>(sum_norm(word_product(fam, w))), q);
  return std::log(s) / static_cast<double>(n);
}

}  // namespace

TEST(Pressure, AtZeroCountsWords) {
  for (const auto& spec : all_specs()) {
    const auto fam = coding_matrices(spec);
    for (std::size_t n : {1u, 3u, 5u})
      EXPECT_DOUBLE_EQ(pressure(fam, 0.0, n), std::log(static_cast<double>(fam.digits()))) << spec.name;
  }
}

TEST(Pressure, MatchesDirectSum) {
  const auto fam = coding_matrices(x20());
  for (double q : {-3.0, -0.5, 0.7, 2.0}) EXPECT_NEAR(pressure(fam, q, 6), naive_pressure(fam, q, 6), 1e-12);
  const auto carpet_fam = coding_matrices(carpet());
  EXPECT_NEAR(pressure(carpet_fam, 1.5, 4), naive_pressure(carpet_fam, 1.5, 4), 1e-12);
}

TEST(Pressure, SingleTypeIsLinear) {
  for (double q : {-40.0, -1.0, 0.5, 3.0}) {
    EXPECT_NEAR(pressure(doubling(), q, 7), q * std::log(2.0), 1e-12);
    EXPECT_NEAR(pressure(doubling(), q, 7, Functional::spectral_radius), q * std::log(2.0), 1e-12);
  }
  EXPECT_NEAR(pressure_asymptote(doubling(), 5).value, std::log(2.0), 1e-12);
  EXPECT_NEAR(pressure_right_derivative(doubling(), 5), std::log(2.0), 1e-12);
}

TEST(Pressure, GasketAtOneExceedsAtZero) {
  const auto fam = coding_matrices(gasket());
  EXPECT_GE(pressure(fam, 1.0, 10), std::log(2.0));
}

TEST(PressureCurve, ConvexAndNondecreasing) {
  for (const auto& spec : all_specs()) {
    const auto fam = coding_matrices(spec);
    for (auto f : {Functional::sum_norm, Functional::spectral_radius}) {
      const auto c = pressure_curve(fam, fam.digits() > 2 ? 4 : 8, default_q_grid(), f);
      const auto& s = c.samples;
      for (std::size_t i = 0; i + 1 < s.size(); ++i) EXPECT_LE(s[i].second, s[i + 1].second + 1e-12) << spec.name;
      for (std::size_t i = 0; i + 2 < s.size(); ++i) {
        const auto [q1, p1] = s[i];
        const auto [q2, p2] = s[i + 1];
        const auto [q3, p3] = s[i + 2];
        const double interp = p1 + (p3 - p1) * (q2 - q1) / (q3 - q1);
        EXPECT_LE(p2, interp + 1e-9) << spec.name << " q=" << q2;
      }
    }
  }
}

TEST(PressureCurve, CsvHeaderAndRows) {
  const auto c = pressure_curve(coding_matrices(gasket()), 4, {-1.0, 0.0, 1.0});
  const auto csv = c.csv();
  EXPECT_EQ(csv.substr(0, 4), "q,P\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(PressureAsymptote, GasketNearZero) {
  const auto est = pressure_asymptote(coding_matrices(gasket()), 12);
  EXPECT_NEAR(est.value, 0.0, 0.05);
}

TEST(PressureAsymptote, CarpetNearLogLsr) {
  const auto fam = coding_matrices(carpet());
  const auto lsr = lsr_bracket(fam, 6);
  EXPECT_NEAR(pressure_asymptote(fam, 10).value, std::log(lsr.mid()), 0.05);
}

TEST(PressureAsymptote, RejectsShallowGrid) {
  EXPECT_THROW(pressure_asymptote(coding_matrices(gasket()), 4, -10.0), std::invalid_argument);
}

TEST(RightDerivative, GasketNearLyapunov) {
  const auto fam = coding_matrices(gasket());
  const auto b = lyapunov_bracket(fam, 12);
  const double d = pressure_right_derivative(fam, 12, 0.01);
  EXPECT_NEAR(d, b.mid(), 0.02);
  EXPECT_LE(std::abs(d - b.mid()), b.width() + 0.02);
  // the sum norm is still within the looser cross-module bound
  const double ds = pressure_right_derivative(fam, 12, 0.01, Functional::sum_norm);
  EXPECT_LE(std::abs(ds - b.mid()), b.width() + 0.02);
}

TEST(RightDerivative, Overlap2dAboveColumnSumBound) {
  const double d = pressure_right_derivative(coding_matrices(overlap2d()), 8, 0.01);
  EXPECT_GE(d, 0.375 * std::log(2.0) - 0.02);
}

TEST(RightDerivative, RejectsBadStep) {
  const auto fam = coding_matrices(gasket());
  EXPECT_THROW(pressure_right_derivative(fam, 4, 0.0), std::invalid_argument);
  EXPECT_THROW(pressure_right_derivative(fam, 4, 0.2), std::invalid_argument);
}

TEST(Typicality, CarpetCertified) {
  const auto fam = coding_matrices(carpet());
  const auto t = typicality_check(fam, 2);
  ASSERT_EQ(t.verdict, Verdict::certified);
  EXPECT_LE(t.pinching_word->size(), 2u);
  EXPECT_LE(t.twisting_word->size(), 2u);
  EXPECT_TRUE(verify_typicality(fam, t));
}

TEST(Typicality, X20NeedsLengthThree) {
  // no word of length <= 2 has pairwise distinct eigenvalue moduli
  const auto fam = coding_matrices(x20());
  const auto short_search = typicality_check(fam, 2);
  EXPECT_EQ(short_search.verdict, Verdict::undetermined);
  EXPECT_FALSE(short_search.pinching_word);
  const auto t = typicality_check(fam, 3);
  ASSERT_EQ(t.verdict, Verdict::certified);
  EXPECT_EQ(*t.pinching_word, (Word{0, 0, 1}));
  EXPECT_EQ(*t.twisting_word, (Word{0}));
  EXPECT_TRUE(verify_typicality(fam, t));
}

TEST(Typicality, X20ProductB0B1HasComplexPair) {
  const auto fam = coding_matrices(x20());
  TypicalityCertificate t;
  t.verdict = Verdict::certified;
  t.pinching_word = Word{0, 1};
  t.twisting_word = Word{1, 1};
  EXPECT_FALSE(verify_typicality(fam, t));
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(word_product(fam, {0, 1})));
  int complex_count = 0;
  for (Eigen::Index i = 0; i < 4; ++i) complex_count += std::abs(es.eigenvalues()(i).imag()) > 1e-6;
  EXPECT_EQ(complex_count, 2);
}

TEST(Typicality, IdentityPairUndetermined) {
  const auto fam = CodingFamily::from_matrices({IntMatrix::identity(2), IntMatrix::identity(2)});
  EXPECT_EQ(typicality_check(fam, 3).verdict, Verdict::undetermined);
}

TEST(Typicality, SingularMemberInapplicable) {
  const auto fam = CodingFamily::from_matrices({mat({{1, 1}, {1, 1}}), mat({{2, 1}, {1, 1}})});
  EXPECT_EQ(typicality_check(fam).verdict, Verdict::inapplicable);
}

TEST(Typicality, BogusCertificateRejected) {
  // the identity has a repeated eigenvalue, so it cannot pinch
  const auto sym = CodingFamily::from_matrices({IntMatrix::identity(2), mat({{2, 1}, {1, 2}})});
  TypicalityCertificate bad;
  bad.verdict = Verdict::certified;
  bad.pinching_word = Word{0};
  bad.twisting_word = Word{1};
  EXPECT_FALSE(verify_typicality(sym, bad));
}

TEST(InterestingInterval, GasketAndOverlapCertified) {
  const auto g = interesting_interval(coding_matrices(gasket()), 14, 4);
  EXPECT_TRUE(g.nonempty_certified);
  EXPECT_EQ(g.certified_hi, 1.0);
  EXPECT_LE(g.hull_lo, 0.6729);
  const auto o = interesting_interval(coding_matrices(overlap2d()), 6, 3);
  EXPECT_TRUE(o.nonempty_certified);
  EXPECT_LE(o.certified_lo, 0.7712);
}

TEST(InterestingInterval, DoublingEmpty) {
  const auto r = interesting_interval(doubling(), 4, 4);
  EXPECT_FALSE(r.nonempty_certified);
  EXPECT_DOUBLE_EQ(r.certified_lo, 0.5);
  EXPECT_DOUBLE_EQ(r.certified_hi, 0.5);
}
