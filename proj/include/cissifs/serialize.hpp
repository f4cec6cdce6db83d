#pragma once

// JSON encodings for families, brackets and replayable certificates.

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bounds.hpp"
#include "ifs.hpp"
#include "interior.hpp"
#include "pressure.hpp"

namespace cissifs {

using Json = nlohmann::json;

inline Json to_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
  return rows;
}

inline IntMatrix int_matrix_from_json(const Json& j) {
  const std::size_t r = j.size();
  const std::size_t c = r ? j.at(0).size() : 0;
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (j.at(i).size() != c) throw std::invalid_argument("ragged matrix in JSON");
    for (std::size_t k = 0; k < c; ++k) m(i, k) = j.at(i).at(k).get<std::int64_t>();
  }
  return m;
}

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

inline Rational rational_from_string(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

/// The family's source (IFS or raw matrices) plus the matrices themselves, row-major.
inline Json family_to_json(const CodingFamily& fam) {
  Json j;
  if (fam.spec) {
    j["name"] = fam.spec->name;
    j["dimension"] = fam.spec->dimension;
    j["base"] = fam.spec->base;
    j["translations"] = fam.spec->translations;
    j["cells"] = fam.basics->cells;
  }
  j["maps"] = fam.maps();
  j["size"] = fam.size();
  Json mats = Json::array();
  for (const auto& m : fam.matrices) mats.push_back(to_json(m));
  j["matrices"] = mats;
  return j;
}

/// Rebuilds a family from its IFS when present, otherwise from the matrices,
/// and rejects documents whose recorded matrices disagree with the rebuild.
inline CodingFamily family_from_json(const Json& j) {
  std::vector<IntMatrix> mats;
  for (const auto& m : j.at("matrices")) mats.push_back(int_matrix_from_json(m));
  if (j.contains("translations")) {
    auto spec = validate_ifs(j.at("dimension").get<int>(), j.at("base").get<std::int64_t>(),
                             j.at("translations").get<std::vector<IntVec>>(), j.value("name", std::string{}));
    auto fam = coding_matrices(spec);
    if (fam.matrices != mats) throw std::invalid_argument("recorded matrices do not match the IFS");
    return fam;
  }
  return CodingFamily::from_matrices(std::move(mats));
}

inline Json to_json(const BoundWitness& w) {
  Json j{{"functional", w.functional}, {"length", w.length}};
  if (w.word) j["word"] = *w.word;
  return j;
}

inline Json to_json(const Bracket& b) {
  return Json{{"lo", b.lo}, {"hi", b.hi}, {"exact", b.exact}, {"lo_witness", to_json(b.lo_witness)},
              {"hi_witness", to_json(b.hi_witness)}};
}

inline Json to_json(const McEstimate& e) {
  return Json{{"value", e.value},   {"std_error", e.std_error}, {"steps", e.steps},
              {"seed", e.seed},     {"renorm_interval", e.renorm_interval}, {"batches", e.batches}};
}

inline Json goodness_certificate_json(const GoodnessCertificate& g) {
  Json j{{"kind", "goodness"}, {"allowable", g.allowable}, {"max_length_searched", g.max_length_searched}};
  if (g.positive_word) j["positive_word"] = *g.positive_word;
  return j;
}

inline Json lsr_certificate_json(const Bracket& lsr) {
  Json j{{"kind", "lsr_exact_one"}};
  if (lsr.exact && lsr.hi_witness.word) j["unit_word"] = *lsr.hi_witness.word;
  return j;
}

inline Json typicality_certificate_json(const TypicalityCertificate& t) {
  Json j{{"kind", "typicality"},        {"verdict", name(t.verdict)}, {"tolerance", t.tolerance},
         {"search_len", t.search_len}, {"eigen_moduli", t.eigen_moduli}, {"determinants", t.determinants},
         {"note", t.note}};
  if (t.pinching_word) j["pinching_word"] = *t.pinching_word;
  if (t.twisting_word) j["twisting_word"] = *t.twisting_word;
  return j;
}

inline TypicalityCertificate typicality_from_json(const Json& j) {
  TypicalityCertificate t;
  const auto v = j.at("verdict").get<std::string>();
  t.verdict = v == "certified" ? Verdict::certified : v == "inapplicable" ? Verdict::inapplicable : Verdict::undetermined;
  t.tolerance = j.at("tolerance").get<double>();
  t.search_len = j.at("search_len").get<std::size_t>();
  if (j.contains("pinching_word")) t.pinching_word = j.at("pinching_word").get<Word>();
  if (j.contains("twisting_word")) t.twisting_word = j.at("twisting_word").get<Word>();
  t.eigen_moduli = j.value("eigen_moduli", std::vector<double>{});
  t.determinants = j.value("determinants", std::vector<double>{});
  return t;
}

inline Json interior_certificate_json(const InteriorCertificate& c) {
  Json j{{"kind", "interior"},
         {"uset", c.uset.vectors},
         {"S", c.S},
         {"c", to_string(c.c)},
         {"p_hat", c.p_hat},
         {"condition1b_assumed", c.condition1b_assumed},
         {"choices", c.choices}};
  Json levels = Json::array();
  for (const auto& x : c.c_by_level) levels.push_back(to_string(x));
  j["c_by_level"] = levels;
  if (c.condition1)
    j["condition1"] = Json{{"word", c.condition1->word}, {"row", c.condition1->row}, {"u_index", c.condition1->u_index}};
  return j;
}

inline InteriorCertificate interior_from_json(const Json& j, std::size_t n) {
  InteriorCertificate c;
  c.uset = VectorFamily::make(j.at("uset").get<std::vector<IntVec>>(), n);
  c.S = j.at("S").get<std::size_t>();
  c.c = rational_from_string(j.at("c").get<std::string>());
  c.p_hat = j.at("p_hat").get<double>();
  c.condition1b_assumed = j.value("condition1b_assumed", true);
  c.choices = j.at("choices").get<std::vector<std::size_t>>();
  for (const auto& x : j.value("c_by_level", std::vector<std::string>{})) c.c_by_level.push_back(rational_from_string(x));
  if (j.contains("condition1")) {
    const auto& w = j.at("condition1");
    c.condition1 = Condition1Witness{w.at("word").get<Word>(), w.at("row").get<std::size_t>(),
                                     w.at("u_index").get<std::size_t>()};
  }
  return c;
}

struct VerificationResult {
  bool ok = true;
  std::vector<std::string> lines;  // one per certificate
};

/// Replays every certificate in a bundle {"family": ..., "certificates": [...]}.
inline VerificationResult verify_bundle(const Json& bundle) {
  VerificationResult res;
  const CodingFamily fam = family_from_json(bundle.at("family"));
  for (const auto& cert : bundle.at("certificates")) {
    const auto kind = cert.at("kind").get<std::string>();
    bool ok = false;
    try {
      if (kind == "goodness") {
        std::vector<bool> allowable;
        for (const auto& b : fam.matrices) allowable.push_back(is_allowable(b));
        ok = allowable == cert.at("allowable").get<std::vector<bool>>();
        if (cert.contains("positive_word"))
          ok = ok && is_strictly_positive(word_product(fam, cert.at("positive_word").get<Word>()));
      } else if (kind == "lsr_exact_one") {
        ok = cert.contains("unit_word") &&
             has_unit_spectral_radius(word_product(fam, cert.at("unit_word").get<Word>())) &&
             std::all_of(fam.matrices.begin(), fam.matrices.end(), [](const IntMatrix& m) { return is_allowable(m); });
      } else if (kind == "typicality") {
        const auto t = typicality_from_json(cert);
        ok = t.verdict != Verdict::certified || verify_typicality(fam, t);
      } else if (kind == "interior") {
        ok = verify_interior_certificate(fam, interior_from_json(cert, fam.size()));
      } else {
        res.lines.push_back("unknown certificate kind '" + kind + "': FAIL");
        res.ok = false;
        continue;
      }
    } catch (const std::exception& e) {
      res.lines.push_back(kind + ": FAIL (" + e.what() + ")");
      res.ok = false;
      continue;
    }
    res.lines.push_back(kind + ": " + (ok ? "ok" : "FAIL"));
    res.ok = res.ok && ok;
  }
  return res;
}

}  // namespace cissifs
