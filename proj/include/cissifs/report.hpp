#pragma once

// Orchestration of all analyses into one PhaseReport and its text form.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "config.hpp"
#include "interior.hpp"
#include "pressure.hpp"
#include "serialize.hpp"

namespace cissifs {

enum class PhaseClass {
  subcritical,
  zero_measure_fractal,
  measure_unresolved,
  empty_interior_certified,
  empty_interior_unresolved,
  interior_possible,
};

inline const char* name(PhaseClass c) {
  switch (c) {
    case PhaseClass::subcritical: return "subcritical";
    case PhaseClass::zero_measure_fractal: return "zero-measure fractal";
    case PhaseClass::measure_unresolved: return "unresolved";
    case PhaseClass::empty_interior_certified: return "positive-measure empty-interior (certified)";
    case PhaseClass::empty_interior_unresolved: return "positive-measure empty-interior (unresolved)";
    case PhaseClass::interior_possible: return "interior-possible";
  }
  return "?";
}

struct Classification {
  double p = 0.0;
  PhaseClass cls = PhaseClass::measure_unresolved;
  std::optional<double> dimension;  // log(Mp)/log L for zero-measure fractals from an IFS
};

struct PhaseReport {
  Config config;
  CodingFamily family;
  std::size_t maps = 0;
  std::size_t types = 0;
  std::int64_t base = 0;
  int dimension = 0;
  GoodnessCertificate goodness;
  CriticalProbabilities critical;
  McEstimate lambda_mc;
  IntervalReport interval;
  TypicalityCertificate typicality;
  VectorFamily uset;
  std::vector<Rational> c_values;
  std::optional<InteriorCertificate> interior;
  std::optional<Classification> query;

  std::optional<double> p_hat() const {
    if (interior) return interior->p_hat;
    return std::nullopt;
  }

  /// Boundaries come only from certified bracket sides.
  Classification classify(double p) const {
    Classification c{p, PhaseClass::measure_unresolved, std::nullopt};
    if (p <= critical.p_extinct) {
      c.cls = PhaseClass::subcritical;
    } else if (interior && p > interior->p_hat) {
      c.cls = PhaseClass::interior_possible;
    } else if (p < critical.p_lebesgue.lo) {
      c.cls = PhaseClass::zero_measure_fractal;
      if (base > 1)
        c.dimension = std::log(static_cast<double>(maps) * p) / std::log(static_cast<double>(base));
    } else if (p <= critical.p_lebesgue.hi) {
      c.cls = PhaseClass::measure_unresolved;
    } else if (p < critical.p_interior_empty.lo) {
      c.cls = PhaseClass::empty_interior_certified;
    } else {
      c.cls = PhaseClass::empty_interior_unresolved;
    }
    return c;
  }

  /// Cross-module contradictions; empty for a sound report.
  std::vector<std::string> consistency_violations() const {
    std::vector<std::string> out;
    if (critical.p_lebesgue.lo > critical.p_lebesgue.hi) out.push_back("p_lebesgue bracket inverted");
    if (critical.p_lebesgue.hi > 1.0 + kBoundSlack) out.push_back("p_lebesgue above 1");
    if (critical.p_lebesgue.hi < critical.p_extinct * (1.0 - kBoundSlack))
      out.push_back("p_lebesgue below the extinction threshold");
    if (interior) {
      if (interior->p_hat < critical.p_interior_empty.lo)
        out.push_back("p_hat below the certified empty-interior threshold");
      if (interior->p_hat < critical.p_lebesgue.lo) out.push_back("p_hat below the certified zero-measure threshold");
      if (critical.lsr.exact && critical.lsr.hi == 1.0 && interior->p_hat < 1.0)
        out.push_back("p_hat < 1 although the lower spectral radius is exactly 1");
    }
    return out;
  }

  Json certificates() const {
    Json certs = Json::array();
    certs.push_back(goodness_certificate_json(goodness));
    if (critical.lsr.exact && critical.lsr.hi == 1.0) certs.push_back(lsr_certificate_json(critical.lsr));
    if (typicality.verdict == Verdict::certified) certs.push_back(typicality_certificate_json(typicality));
    if (interior) certs.push_back(interior_certificate_json(*interior));
    return Json{{"family", family_to_json(family)}, {"certificates", certs}};
  }
};

/// The all-ones vector, used when a config names no U.
inline VectorFamily default_uset(std::size_t n) { return VectorFamily::make({IntVec(n, 1)}, n); }

inline PhaseReport build_report(const Config& cfg) {
  PhaseReport r;
  r.config = cfg;
  r.family = cfg.family();
  const auto& b = cfg.budgets;
  r.maps = static_cast<std::size_t>(r.family.maps());
  r.types = r.family.size();
  if (r.family.spec) {
    r.base = r.family.spec->base;
    r.dimension = r.family.spec->dimension;
  }
  r.goodness = goodness_check(r.family, b.goodness_length);
  r.critical = critical_probabilities(r.family, b.bracket_length, b.lsr_length);
  r.lambda_mc = lyapunov_mc(r.family, b.mc_steps, cfg.seed);
  r.interval = interesting_interval(r.critical);
  r.typicality = typicality_check(r.family, b.typicality_length);
  r.uset = cfg.uset ? VectorFamily::make(*cfg.uset, r.types) : default_uset(r.types);
  r.interior = critical_p_interior(r.family, r.uset, b.interior_length, &r.c_values);
  if (cfg.p) r.query = r.classify(*cfg.p);
  return r;
}

namespace detail {
inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// Line-oriented document: `key: value` pairs plus `[csv name] ... [end]`
/// and `[json certificates] ... [end]` blocks.
inline std::string render_report(const PhaseReport& r) {
  using detail::num;
  std::ostringstream os;
  const auto bracket = [&](const std::string& key, const Bracket& b) {
    os << key << ".lo: " << num(b.lo) << '\n' << key << ".hi: " << num(b.hi) << '\n';
    os << key << ".lo_witness: " << b.lo_witness.describe() << '\n';
    os << key << ".hi_witness: " << b.hi_witness.describe() << '\n';
    if (b.exact) os << key << ".exact: true\n";
  };
  os << "format: cissifs-phase-report 1\n";
  os << "name: " << r.config.name << '\n';
  if (r.family.spec) {
    const auto& s = *r.family.spec;
    os << "dimension: " << s.dimension << "\nbase: " << s.base << "\ntranslations:";
    for (const auto& t : s.translations) {
      os << " (";
      for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
      os << ')';
    }
    os << '\n';
  }
  os << "N: " << r.types << "\nM: " << r.maps << "\ndigits: " << r.family.digits() << '\n';
  os << "seed: " << r.config.seed << '\n';
  for (std::size_t i = 0; i < r.family.digits(); ++i) os << "B[" << i << "]: " << r.family[i] << '\n';

  os << "goodness.all_allowable: " << (r.goodness.all_allowable() ? "true" : "false") << '\n';
  os << "goodness.positive_word: " << (r.goodness.positive_word ? to_string(*r.goodness.positive_word) : "none")
     << '\n';

  bracket("lambda", r.critical.lambda);
  os << "lambda.mc: " << num(r.lambda_mc.value) << "\nlambda.mc_std_error: " << num(r.lambda_mc.std_error)
     << "\nlambda.mc_steps: " << r.lambda_mc.steps << '\n';
  bracket("lsr", r.critical.lsr);
  os << "p_extinct: " << num(r.critical.p_extinct) << '\n';
  os << "p_lebesgue.lo: " << num(r.critical.p_lebesgue.lo) << "\np_lebesgue.hi: " << num(r.critical.p_lebesgue.hi)
     << '\n';
  os << "p_interior_empty.lo: " << num(r.critical.p_interior_empty.lo)
     << "\np_interior_empty.hi: " << num(r.critical.p_interior_empty.hi) << '\n';
  os << "interesting_interval: " << (r.interval.nonempty_certified ? "nonempty certified" : "not certified") << " ("
     << num(r.interval.certified_lo) << ", " << num(r.interval.certified_hi) << ")\n";
  os << "typicality: " << name(r.typicality.verdict) << '\n';
  if (!r.typicality.note.empty()) os << "typicality.note: " << r.typicality.note << '\n';

  os << "uset:";
  for (const auto& v : r.uset.vectors) {
    os << " (";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ')';
  }
  os << '\n';
  if (r.interior) {
    os << "p_hat: " << num(r.interior->p_hat) << "\np_hat.S: " << r.interior->S
       << "\np_hat.c: " << to_string(r.interior->c) << '\n';
  } else {
    os << "p_hat: none\n";
  }
  os << "condition1b: assumed\n";
  if (r.query) {
    os << "query.p: " << num(r.query->p) << "\nquery.class: " << name(r.query->cls) << '\n';
    if (r.query->dimension) os << "query.dimension: " << num(*r.query->dimension) << '\n';
  }
  const auto issues = r.consistency_violations();
  os << "consistency: " << (issues.empty() ? "ok" : "VIOLATED") << '\n';
  for (const auto& s : issues) os << "consistency.issue: " << s << '\n';

  os << "[csv c_values]\nS,c\n";
  for (std::size_t s = 0; s < r.c_values.size(); ++s) os << s + 1 << ',' << to_string(r.c_values[s]) << '\n';
  os << "[end]\n";
  os << "[json certificates]\n" << r.certificates().dump() << "\n[end]\n";
  return os.str();
}

/// Pulls the certificate bundle out of a rendered report, or parses the text
/// as a bare JSON bundle.
inline Json extract_certificates(const std::string& text) {
  const std::string open = "[json certificates]\n";
  const auto at = text.find(open);
  if (at == std::string::npos) return Json::parse(text);
  const auto start = at + open.size();
  const auto stop = text.find("\n[end]", start);
  if (stop == std::string::npos) throw std::invalid_argument("unterminated certificate block");
  return Json::parse(text.substr(start, stop - start));
}

}  // namespace cissifs
