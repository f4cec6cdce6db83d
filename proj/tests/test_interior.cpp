#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace cissifs;
using namespace fixtures;

namespace {

// min over words and u of max over v of min_j (u^T B_w)_j / v_j, in doubles.
double naive_c(const CodingFamily& fam, const std::vector<IntVec>& uset, std::size_t S) {
  double c = INFINITY;
  for (const auto& w : all_words(fam.digits(), S)) {
    const auto p = word_product(fam, w);
    for (const auto& u : uset) {
      std::vector<double> r(fam.size(), 0.0);
      for (std::size_t i = 0; i < fam.size(); ++i)
        for (std::size_t j = 0; j < fam.size(); ++j) r[j] += static_cast<double>(u[i] * p(i, j));
      double best = 0;
      for (const auto& v : uset) {
        double worst = INFINITY;
        for (std::size_t j = 0; j < v.size(); ++j)
          if (v[j] > 0) worst = std::min(worst, r[j] / static_cast<double>(v[j]));
        best = std::max(best, worst);
      }
      c = std::min(c, best);
    }
  }
  return c;
}

bool row_dominates(const IntMatrix& p, const IntVec& u) {
  for (std::size_t i = 0; i < p.rows(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < p.cols(); ++j) ok = ok && p(i, j) >= u[j];
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST(Condition2Star, MatchesNaiveEvaluation) {
  const auto fam = coding_matrices(x20());
  const auto uset = VectorFamily::make(x20_uset(), 4);
  for (std::size_t S = 1; S <= 7; ++S)
    EXPECT_NEAR(to_double(condition2star_constant(fam, uset, S).c), naive_c(fam, x20_uset(), S), 1e-12) << S;
  const auto carpet_fam = coding_matrices(carpet());
  const std::vector<IntVec> pool{{1, 0}, {1, 1}, {0, 1}};
  for (std::size_t S = 1; S <= 4; ++S)
    EXPECT_NEAR(to_double(condition2star_constant(carpet_fam, VectorFamily::make(pool, 2), S).c),
                naive_c(carpet_fam, pool, S), 1e-12);
}

TEST(Condition2Star, X20ReachesThreeSeventySevenAtThirteen) {
  const auto fam = coding_matrices(x20());
  const auto res = condition2star_constant(fam, VectorFamily::make(x20_uset(), 4), 13);
  EXPECT_EQ(res.c, Rational(377));
}

TEST(Condition2Star, Supermultiplicative) {
  const auto fam = coding_matrices(x20());
  const auto uset = VectorFamily::make(x20_uset(), 4);
  std::vector<Rational> c;
  for (std::size_t S = 1; S <= 8; ++S) c.push_back(condition2star_constant(fam, uset, S).c);
  for (std::size_t s = 1; s <= 8; ++s)
    for (std::size_t t = 1; s + t <= 8; ++t) EXPECT_GE(c[s + t - 1], c[s - 1] * c[t - 1]) << s << '+' << t;
}

TEST(Condition2Star, EmptyWordGivesOneForAllOnes) {
  const auto fam = coding_matrices(gasket());
  EXPECT_EQ(condition2star_constant(fam, default_uset(2), 0).c, Rational(1));
}

TEST(Condition2Star, AllOnesIsMinimumColumnSum) {
  for (const auto& spec : all_specs()) {
    const auto fam = coding_matrices(spec);
    const auto uset = default_uset(fam.size());
    const std::size_t top = fam.digits() > 2 ? 3 : 6;
    for (std::size_t S = 1; S <= top; ++S) {
      std::int64_t m = -1;
      for (const auto& w : all_words(fam.digits(), S)) {
        const auto c = min_col_sum(word_product(fam, w));
        if (m < 0 || c < m) m = c;
      }
      EXPECT_EQ(condition2star_constant(fam, uset, S).c, Rational(m)) << spec.name << " S=" << S;
    }
  }
}

TEST(Condition2Star, HoldsAtMatchesThreshold) {
  const auto fam = coding_matrices(x20());
  const auto res = condition2star_constant(fam, VectorFamily::make(x20_uset(), 4), 13);
  EXPECT_TRUE(res.holds_at(Rational(64, 100)));
  EXPECT_FALSE(res.holds_at(Rational(63, 100)));
}

TEST(Condition2Star, RejectsWrongLength) {
  const auto fam = coding_matrices(x20());
  EXPECT_THROW(condition2star_constant(fam, VectorFamily::make({{1, 1}}, 2), 2), std::invalid_argument);
  EXPECT_THROW(VectorFamily::make({{0, 0}}, 2), std::invalid_argument);
  EXPECT_THROW(VectorFamily::make({{1, -1}}, 2), std::invalid_argument);
}

TEST(Condition1, ShortestWitness) {
  for (const auto& [spec, uset] : std::vector<std::pair<IfsSpec, std::vector<IntVec>>>{
           {gasket(), {{1, 1}}}, {x20(), x20_uset()}, {carpet(), {{1, 1}}}}) {
    const auto fam = coding_matrices(spec);
    const auto vf = VectorFamily::make(uset, fam.size());
    const auto w = condition1_check(fam, vf, 6);
    ASSERT_TRUE(w) << spec.name;
    EXPECT_TRUE(verify_condition1(fam, vf, *w));
    for (std::size_t n = 1; n < w->word.size(); ++n)
      for (const auto& word : all_words(fam.digits(), n))
        for (const auto& u : uset) EXPECT_FALSE(row_dominates(word_product(fam, word), u)) << spec.name;
  }
}

TEST(Condition1, GasketSingleLetter) {
  const auto fam = coding_matrices(gasket());
  const auto w = condition1_check(fam, default_uset(2), 4);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->word, Word{0});
  EXPECT_EQ(w->row, 1u);
}

TEST(Condition1, TamperedWitnessRejected) {
  const auto fam = coding_matrices(gasket());
  const auto vf = default_uset(2);
  auto w = *condition1_check(fam, vf, 4);
  w.row = 0;
  EXPECT_FALSE(verify_condition1(fam, vf, w));
}

TEST(Condition2, CoherentWithStar) {
  const auto fam = coding_matrices(x20());
  const auto uset = VectorFamily::make(x20_uset(), 4);
  const auto above = condition2_matrix_check(fam, uset, 13, Rational(64, 100));
  ASSERT_TRUE(above);
  EXPECT_GT(above->min_row_sum, 1);
  EXPECT_EQ(above->a.size(), word_count(2, 13));
  EXPECT_TRUE(verify_condition2(fam, uset, *above));
  EXPECT_FALSE(condition2_matrix_check(fam, uset, 13, Rational(62, 100)));
}

TEST(Condition2, TamperedFamilyRejected) {
  const auto fam = coding_matrices(x20());
  const auto uset = VectorFamily::make(x20_uset(), 4);
  auto f = *condition2_matrix_check(fam, uset, 13, Rational(7, 10));
  f.a[5](0, 0) *= 100;
  EXPECT_FALSE(verify_condition2(fam, uset, f));
}

TEST(CriticalInterior, X20Value) {
  const auto fam = coding_matrices(x20());
  std::vector<Rational> cs;
  const auto cert = critical_p_interior(fam, VectorFamily::make(x20_uset(), 4), 13, &cs);
  ASSERT_TRUE(cert);
  ASSERT_EQ(cs.size(), 13u);
  EXPECT_EQ(cs.back(), Rational(377));
  EXPECT_NEAR(cert->p_hat, 0.633607, 5e-7);
  EXPECT_GE(cert->p_hat, std::pow(377.0, -1.0 / 13.0));
  EXPECT_TRUE(verify_interior_certificate(fam, *cert));
}

TEST(CriticalInterior, NoneWithoutGrowth) {
  const auto fam = coding_matrices(gasket());
  const auto pool = binary_vector_candidates(2, 2);
  for (std::size_t mask = 1; mask < (1u << pool.size()); ++mask) {
    std::vector<IntVec> u;
    for (std::size_t k = 0; k < pool.size(); ++k)
      if (mask >> k & 1) u.push_back(pool[k]);
    EXPECT_FALSE(critical_p_interior(fam, VectorFamily::make(u, 2), 10)) << mask;
  }
}

TEST(CriticalInterior, CertificateRoundTripAndTamper) {
  const auto fam = coding_matrices(x20());
  const auto cert = *critical_p_interior(fam, VectorFamily::make(x20_uset(), 4), 13);
  const auto back = interior_from_json(interior_certificate_json(cert), 4);
  EXPECT_TRUE(verify_interior_certificate(fam, back));

  auto bad_c = back;
  bad_c.c = Rational(378);
  EXPECT_FALSE(verify_interior_certificate(fam, bad_c));
  auto bad_p = back;
  bad_p.p_hat = 0.6;
  EXPECT_FALSE(verify_interior_certificate(fam, bad_p));
  auto bad_choice = back;
  bad_choice.choices[3] = 7;
  EXPECT_FALSE(verify_interior_certificate(fam, bad_choice));
  auto no_c1 = back;
  no_c1.condition1.reset();
  EXPECT_FALSE(verify_interior_certificate(fam, no_c1));
}

TEST(MinColumnSum, DoublingThresholdIsHalf) {
  const auto r = min_column_sum_check(doubling(), 4);
  EXPECT_TRUE(r.applies);
  EXPECT_DOUBLE_EQ(r.threshold_p, 0.5);
}

TEST(MinColumnSum, GasketNeverApplies) {
  EXPECT_FALSE(min_column_sum_check(coding_matrices(gasket()), 12).applies);
}

TEST(MinColumnSum, CarpetGrowthTwo) {
  const auto r = min_column_sum_check(coding_matrices(carpet()), 4);
  EXPECT_TRUE(r.applies);
  EXPECT_NEAR(r.growth, 2.0, 1e-12);
}

TEST(ExactRational, ExactConversion) {
  EXPECT_EQ(exact_rational(0.5), Rational(1, 2));
  EXPECT_EQ(exact_rational(0.1) * 10 == 1, false);
  EXPECT_EQ(to_double(exact_rational(0.633607)), 0.633607);
}
