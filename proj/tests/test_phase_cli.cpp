#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"

using namespace cissifs;
using namespace fixtures;

namespace {

std::string config_path(const std::string& name) { return std::string(CISSIFS_CONFIG_DIR) + "/" + name + ".yaml"; }

int error_line(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.line;
  }
  ADD_FAILURE() << "accepted:\n" << text;
  return -2;
}

Config quick(Config c) {
  c.budgets.mc_steps = 20'000;
  return c;
}

}  // namespace

TEST(Config, ParsesShippedFiles) {
  for (const char* n : {"carpet", "gasket", "x20", "overlap2d", "doubling", "unit"}) {
    const auto c = load_config(config_path(n));
    EXPECT_NO_THROW(c.family()) << n;
  }
  const auto g = load_config(config_path("gasket"));
  EXPECT_EQ(g.family().matrices, gasket_display());
  EXPECT_EQ(*g.p, 0.7);
  EXPECT_EQ(g.budgets.bracket_length, 14u);
}

TEST(Config, ErrorsCarryLines) {
  EXPECT_EQ(error_line("base: 2\ntranslations: [0, 1, 2]\nbogus: 1\n"), 2);
  EXPECT_EQ(error_line("base: 2\ntranslations: [0, 1, 2]\np: 1.5\n"), 2);
  EXPECT_EQ(error_line("base: 3\n\ntranslations: [0, 1]\n"), 2);
  EXPECT_EQ(error_line("base: 2\ntranslations: [0, 1, 2]\nbudgets:\n  lsr_length: 3\n  depth: 4\n"), 4);
  EXPECT_EQ(error_line("base: two\ntranslations: [0, 1, 2]\n"), 0);
  EXPECT_GE(error_line("base: 2\ntranslations: [0, 1, 2\n"), 0);
}

TEST(Config, NeedsExactlyOneSource) {
  EXPECT_THROW(parse_config_string("base: 2\n"), ConfigError);
  EXPECT_THROW(parse_config_string("base: 2\ntranslations: [0, 1]\nmatrices: [[[2]]]\n"), ConfigError);
  EXPECT_THROW(parse_config_string("matrices: [[[1, 2], [3]]]\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/x.yaml"), ConfigError);
}

TEST(Config, PlanarTranslations) {
  const auto c = load_config(config_path("overlap2d"));
  ASSERT_TRUE(c.spec);
  EXPECT_EQ(c.spec->dimension, 2);
  EXPECT_EQ(c.spec->maps(), 9u);
}

TEST(Report, GasketAtSevenTenthsCertifiedEmptyInterior) {
  const auto r = build_report(quick(load_config(config_path("gasket"))));
  ASSERT_TRUE(r.query);
  EXPECT_EQ(r.query->cls, PhaseClass::empty_interior_certified);
  EXPECT_TRUE(r.critical.lsr.exact);
  EXPECT_EQ(r.critical.lsr.hi, 1.0);
  EXPECT_FALSE(r.p_hat());
  EXPECT_TRUE(r.consistency_violations().empty());
}

TEST(Report, GasketAtHalfIsZeroMeasure) {
  auto cfg = quick(load_config(config_path("gasket")));
  cfg.p = 0.5;
  const auto r = build_report(cfg);
  EXPECT_EQ(r.query->cls, PhaseClass::zero_measure_fractal);
  ASSERT_TRUE(r.query->dimension);
  EXPECT_NEAR(*r.query->dimension, std::log2(1.5), 1e-12);
  EXPECT_EQ(r.classify(0.3).cls, PhaseClass::subcritical);
  EXPECT_EQ(r.classify(1.0 / 3.0).cls, PhaseClass::subcritical);
}

TEST(Report, X20InteriorPossible) {
  const auto r = build_report(quick(load_config(config_path("x20"))));
  ASSERT_TRUE(r.p_hat());
  EXPECT_NEAR(*r.p_hat(), 0.633607, 5e-7);
  EXPECT_EQ(r.query->cls, PhaseClass::interior_possible);
  EXPECT_EQ(r.typicality.verdict, Verdict::certified);
  EXPECT_TRUE(r.consistency_violations().empty());
  EXPECT_EQ(r.classify(*r.p_hat()).cls == PhaseClass::interior_possible, false);
}

TEST(Report, DoublingSingleType) {
  const auto r = build_report(quick(load_config(config_path("doubling"))));
  EXPECT_EQ(r.query->cls, PhaseClass::subcritical);
  EXPECT_EQ(r.typicality.verdict, Verdict::inapplicable);
  EXPECT_EQ(r.classify(0.6).cls, PhaseClass::interior_possible);
}

TEST(Report, RenderIsDeterministic) {
  const auto cfg = quick(load_config(config_path("x20")));
  const auto a = render_report(build_report(cfg));
  set_threads(3);
  const auto b = render_report(build_report(cfg));
  set_threads(0);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("query.class: interior-possible"), std::string::npos);
  EXPECT_NE(a.find("[csv c_values]"), std::string::npos);
}

TEST(Report, CertificatesRoundTrip) {
  for (const char* n : {"gasket", "x20", "carpet"}) {
    const auto text = render_report(build_report(quick(load_config(config_path(n)))));
    const auto bundle = extract_certificates(text);
    const auto v = verify_bundle(bundle);
    EXPECT_TRUE(v.ok) << n;
    EXPECT_FALSE(v.lines.empty());
    EXPECT_EQ(verify_bundle(extract_certificates(bundle.dump())).ok, true);
  }
}

TEST(Report, TamperedBundleFails) {
  const auto r = build_report(quick(load_config(config_path("x20"))));
  auto bundle = r.certificates();
  for (auto& c : bundle["certificates"])
    if (c["kind"] == "interior") c["c"] = "378";
  EXPECT_FALSE(verify_bundle(bundle).ok);

  auto wrong_family = r.certificates();
  wrong_family["family"] = family_to_json(coding_matrices(carpet()));
  EXPECT_FALSE(verify_bundle(wrong_family).ok);

  auto unknown = r.certificates();
  unknown["certificates"].push_back(Json{{"kind", "mystery"}});
  EXPECT_FALSE(verify_bundle(unknown).ok);
}

TEST(Render, HeadersAndBarcode) {
  const auto spec = unit_line();
  const auto fam = coding_matrices(spec);
  const auto g = coverage_grid(simulate_tree(spec, 1.0, 5, 1), fam, 5);
  const auto img = render_grid(g, Shading::binary, 4);
  EXPECT_EQ(img.width, 32u);
  for (auto px : img.pixels) EXPECT_EQ(px, 0);

  std::ostringstream pgm, ppm;
  write_pgm(pgm, img);
  write_ppm(ppm, img);
  EXPECT_EQ(pgm.str().substr(0, 11), "P5\n32 4\n255");
  EXPECT_EQ(ppm.str().substr(0, 11), "P6\n32 4\n255");
  EXPECT_EQ(pgm.str().size(), 12u + 128u);
  EXPECT_EQ(ppm.str().size(), 12u + 384u);
}

TEST(Render, PlanarAndShading) {
  const auto spec = overlap2d();
  const auto fam = coding_matrices(spec);
  const auto g = coverage_grid(simulate_tree(spec, 1.0, 3, 1), fam, 3);
  const auto img = render_grid(g, Shading::multiplicity);
  EXPECT_EQ(img.width, img.height);
  EXPECT_EQ(img.width, g.extent);
  EXPECT_EQ(shade(0, 5, Shading::multiplicity), 255);
  EXPECT_EQ(shade(5, 5, Shading::multiplicity), 0);
  EXPECT_LT(shade(4, 5, Shading::multiplicity), shade(1, 5, Shading::multiplicity));
}
