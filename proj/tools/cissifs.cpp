// Command-line front end: one subcommand per analysis.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cissifs/cissifs.hpp"

using namespace cissifs;

namespace {

enum Exit { ok = 0, validation = 2, budget = 3, certificate = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path, -1);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

double query_p(const Config& cfg, double flag) {
  if (flag > 0) return flag;
  if (cfg.p) return *cfg.p;
  throw std::invalid_argument("no probability given: pass --p or set 'p' in the config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coin-tossing integer self-similar IFS analysis"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  std::string config;
  auto add_config = [&](CLI::App* sub) { sub->add_option("config", config, "YAML config")->required(); };

  auto* matrices = app.add_subcommand("matrices", "print the coding matrices");
  add_config(matrices);
  bool matrices_json = false;
  matrices->add_flag("--json", matrices_json, "emit the family as JSON");

  auto* goodness = app.add_subcommand("goodness", "allowability and a strictly positive product");
  add_config(goodness);
  std::size_t goodness_len = 0;
  goodness->add_option("--length", goodness_len, "maximal search length");

  auto* lyapunov = app.add_subcommand("lyapunov", "Lyapunov exponent bracket and Monte-Carlo estimate");
  add_config(lyapunov);
  std::size_t lyap_m = 0, mc_steps = 0, renorm = 32;
  std::uint64_t seed = 0;
  bool lyap_csv = false;
  lyapunov->add_option("--m", lyap_m, "word length");
  lyapunov->add_option("--mc-steps", mc_steps, "Monte-Carlo steps (0 = config budget)");
  lyapunov->add_option("--renorm", renorm, "renormalisation interval");
  lyapunov->add_option("--seed", seed, "seed (0 = config seed)");
  lyapunov->add_flag("--csv", lyap_csv, "print the bracket for every m up to --m");

  auto* lsr = app.add_subcommand("lsr", "lower spectral radius bracket");
  add_config(lsr);
  std::size_t lsr_n = 0;
  lsr->add_option("--n", lsr_n, "maximal word length");

  auto* pressure_cmd = app.add_subcommand("pressure", "pressure curve, asymptote and right derivative");
  add_config(pressure_cmd);
  std::size_t pressure_n = 0;
  std::string functional = "sum";
  pressure_cmd->add_option("--n", pressure_n, "word length");
  pressure_cmd->add_option("--functional", functional, "sum or rho")->check(CLI::IsMember({"sum", "rho"}));

  auto* typicality = app.add_subcommand("typicality", "pinching and twisting search");
  add_config(typicality);
  std::size_t typ_len = 0;
  double typ_tol = 1e-9;
  typicality->add_option("--length", typ_len, "maximal word length");
  typicality->add_option("--tol", typ_tol, "numerical tolerance");

  auto* simulate = app.add_subcommand("simulate", "one realization of the random cylinder tree");
  add_config(simulate);
  double sim_p = 0;
  std::size_t sim_depth = 0;
  std::string sim_out;
  simulate->add_option("--p", sim_p, "retention probability");
  simulate->add_option("--depth", sim_depth, "tree depth (0 = config budget)");
  simulate->add_option("--seed", seed, "seed (0 = config seed)");
  simulate->add_option("--out", sim_out, "coverage CSV path (default stdout)");

  auto* extinction = app.add_subcommand("extinction", "extinction probability in a digit environment");
  add_config(extinction);
  double ext_p = 0;
  std::size_t ext_depth = 40, ext_runs = 0, ext_start = 0;
  std::string ext_env;
  extinction->add_option("--p", ext_p, "retention probability");
  extinction->add_option("--depth", ext_depth, "environment length");
  extinction->add_option("--runs", ext_runs, "also estimate by simulation with this many runs");
  extinction->add_option("--seed", seed, "seed for the environment and runs (0 = config seed)");
  extinction->add_option("--env", ext_env, "periodic environment digits, e.g. 01 (default: i.i.d. uniform)");
  extinction->add_option("--start", ext_start, "type of the ancestor");

  auto* interior = app.add_subcommand("interior", "conditions guaranteeing an interval");
  add_config(interior);
  std::size_t max_s = 0;
  std::string interior_out;
  interior->add_option("--max-s", max_s, "maximal word length S");
  interior->add_option("--certificate", interior_out, "write the certificate bundle here");

  auto* report = app.add_subcommand("report", "full phase report");
  add_config(report);
  double report_p = 0;
  std::string report_out, report_certs;
  std::size_t override_m = 0, override_n = 0, override_s = 0, override_steps = 0;
  report->add_option("--p", report_p, "query probability");
  report->add_option("--out", report_out, "report path (default stdout)");
  report->add_option("--certificates", report_certs, "also write the certificate bundle as JSON");
  report->add_option("--bracket-length", override_m, "Lyapunov word length");
  report->add_option("--lsr-length", override_n, "lower spectral radius word length");
  report->add_option("--interior-length", override_s, "maximal S for interior conditions");
  report->add_option("--mc-steps", override_steps, "Monte-Carlo steps");
  report->add_option("--seed", seed, "seed (0 = config seed)");

  auto* verify = app.add_subcommand("verify-certificate", "replay a certificate bundle or report");
  std::string cert_path;
  verify->add_option("file", cert_path, "JSON bundle or report text")->required();

  auto* render = app.add_subcommand("render", "bitmap of a level-n approximation");
  add_config(render);
  double render_p = 0;
  std::size_t level = 6;
  std::string render_out, format = "pgm", shading = "binary";
  render->add_option("--p", render_p, "retention probability (1 = deterministic)");
  render->add_option("--level", level, "approximation level");
  render->add_option("--seed", seed, "seed (0 = config seed)");
  render->add_option("--out", render_out, "image path")->required();
  render->add_option("--format", format, "pgm or ppm")->check(CLI::IsMember({"pgm", "ppm"}));
  render->add_option("--shading", shading, "binary or multiplicity")->check(CLI::IsMember({"binary", "multiplicity"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Exit::ok : Exit::validation;
  }
  set_threads(threads);

  try {
    if (verify->parsed()) {
      const auto res = verify_bundle(extract_certificates(read_file(cert_path)));
      for (const auto& l : res.lines) std::cout << l << '\n';
      std::cout << (res.ok ? "all certificates verified\n" : "verification FAILED\n");
      return res.ok ? Exit::ok : Exit::certificate;
    }

    Config cfg = load_config(config);
    if (seed != 0) cfg.seed = seed;
    const CodingFamily fam = cfg.family();
    const auto& b = cfg.budgets;

    if (matrices->parsed()) {
      if (matrices_json) {
        std::cout << family_to_json(fam).dump(2) << '\n';
      } else {
        if (fam.basics) {
          std::cout << "basic cells:";
          for (const auto& c : fam.basics->cells) {
            std::cout << " (";
            for (std::size_t i = 0; i < c.size(); ++i) std::cout << (i ? "," : "") << c[i];
            std::cout << ')';
          }
          std::cout << '\n';
        }
        for (std::size_t i = 0; i < fam.digits(); ++i) std::cout << "B_" << i << " = " << fam[i] << '\n';
      }
    } else if (goodness->parsed()) {
      const auto g = goodness_check(fam, goodness_len ? goodness_len : b.goodness_length);
      std::cout << goodness_certificate_json(g).dump(2) << '\n';
      std::cout << (g.good() ? "good" : "not certified good") << '\n';
    } else if (lyapunov->parsed()) {
      const std::size_t m = lyap_m ? lyap_m : b.bracket_length;
      if (lyap_csv) {
        std::cout << lyapunov_convergence_csv(fam, m);
      } else {
        const auto br = lyapunov_bracket(fam, m);
        const auto mc = lyapunov_mc(fam, mc_steps ? mc_steps : b.mc_steps, cfg.seed, renorm);
        std::cout.precision(10);
        std::cout << "lambda in [" << br.lo << ", " << br.hi << "] (m = " << m << ")\n";
        std::cout << "lambda MC = " << mc.value << " +/- " << mc.std_error << " (" << mc.steps << " steps)\n";
        std::cout << "p_lebesgue in [" << std::exp(-br.hi) << ", " << std::min(1.0, std::exp(-br.lo)) << "]\n";
      }
    } else if (lsr->parsed()) {
      const auto br = lsr_bracket(fam, lsr_n ? lsr_n : b.lsr_length);
      std::cout.precision(10);
      if (br.exact)
        std::cout << "lower spectral radius = " << br.hi << " (exact), witness " << br.hi_witness.describe() << '\n';
      else
        std::cout << "lower spectral radius in [" << br.lo << ", " << br.hi << "]\n"
                  << "  lo: " << br.lo_witness.describe() << "\n  hi: " << br.hi_witness.describe() << '\n';
    } else if (pressure_cmd->parsed()) {
      const std::size_t n = pressure_n ? pressure_n : b.pressure_length;
      const auto f = functional == "rho" ? Functional::spectral_radius : Functional::sum_norm;
      std::cout << pressure_curve(fam, n, default_q_grid(), f).csv();
      std::cout.precision(10);
      std::cout << "# asymptote slope (log lsr estimate): " << pressure_asymptote(fam, n).value << '\n';
      std::cout << "# right derivative at 0 (lambda estimate): " << pressure_right_derivative(fam, n) << '\n';
    } else if (typicality->parsed()) {
      const auto t = typicality_check(fam, typ_len ? typ_len : b.typicality_length, typ_tol);
      std::cout << typicality_certificate_json(t).dump(2) << '\n' << name(t.verdict) << '\n';
    } else if (simulate->parsed()) {
      if (!fam.spec) throw std::invalid_argument("simulate needs an IFS config");
      const auto r = simulate_tree(*fam.spec, query_p(cfg, sim_p), sim_depth ? sim_depth : b.tree_depth, cfg.seed);
      std::cout << "survived: " << (r.survived() ? "yes" : "no") << '\n';
      if (r.survived() && r.depth() >= 8)
        std::cout << "dimension estimate: " << *dimension_estimate(r, fam.spec->base) << '\n';
      write_text(sim_out, coverage_csv(coverage_stats(r, fam)));
    } else if (extinction->parsed()) {
      const double p = query_p(cfg, ext_p);
      EnvWord env;
      if (ext_env.empty()) {
        env = EnvWord::sampled(fam.digits(), ext_depth, cfg.seed);
      } else {
        Word period;
        for (char c : ext_env) {
          if (c < '0' || c > '9') throw std::invalid_argument("--env takes decimal digits");
          period.push_back(static_cast<Digit>(c - '0'));
        }
        env = EnvWord::periodic(period, ext_depth);
      }
      env.check(fam.digits());
      const auto s = extinction_iterate(fam, p, env);
      std::cout.precision(12);
      std::cout << "environment: " << env.source << '\n';
      for (std::size_t i = 0; i < s.s.size(); ++i) std::cout << "q[" << i << "] = " << s.s[i] << '\n';
      if (ext_runs) {
        const auto fr = extinction_frequency(fam, p, env, ext_depth, ext_runs, cfg.seed, 1'000'000, ext_start);
        std::cout << "simulated extinction frequency (type " << ext_start << "): " << fr.rate() << " over "
                  << fr.runs << " runs\n";
      }
    } else if (interior->parsed()) {
      const VectorFamily uset = cfg.uset ? VectorFamily::make(*cfg.uset, fam.size()) : default_uset(fam.size());
      std::vector<Rational> cs;
      const auto cert = critical_p_interior(fam, uset, max_s ? max_s : b.interior_length, &cs);
      for (std::size_t s = 0; s < cs.size(); ++s) std::cout << "c(" << s + 1 << ") = " << to_string(cs[s]) << '\n';
      std::cout.precision(10);
      if (cert) {
        std::cout << "p_hat = " << cert->p_hat << " (S = " << cert->S << ", c = " << to_string(cert->c) << ")\n";
        if (!interior_out.empty()) {
          Json bundle{{"family", family_to_json(fam)}, {"certificates", Json::array({interior_certificate_json(*cert)})}};
          write_text(interior_out, bundle.dump(2) + "\n");
        }
      } else {
        std::cout << "p_hat: none found\n";
      }
    } else if (report->parsed()) {
      if (report_p > 0) cfg.p = report_p;
      if (override_m) cfg.budgets.bracket_length = override_m;
      if (override_n) cfg.budgets.lsr_length = override_n;
      if (override_s) cfg.budgets.interior_length = override_s;
      if (override_steps) cfg.budgets.mc_steps = override_steps;
      const auto r = build_report(cfg);
      write_text(report_out, render_report(r));
      if (!report_certs.empty()) write_text(report_certs, r.certificates().dump(2) + "\n");
    } else if (render->parsed()) {
      if (!fam.spec) throw std::invalid_argument("render needs an IFS config");
      const double p = render_p > 0 ? render_p : cfg.p.value_or(1.0);
      const auto r = simulate_tree(*fam.spec, p, level, cfg.seed);
      const auto g = coverage_grid(r, fam, level);
      const auto img = render_grid(g, shading == "binary" ? Shading::binary : Shading::multiplicity);
      write_image(render_out, img, format == "pgm" ? ImageFormat::pgm : ImageFormat::ppm);
      std::cout << "wrote " << render_out << " (" << img.width << "x" << img.height << ")\n";
    }
  } catch (const BudgetError& e) {
    std::cerr << "budget refused: " << e.what() << '\n';
    return Exit::budget;
  } catch (const std::length_error& e) {
    std::cerr << "budget refused: " << e.what() << '\n';
    return Exit::budget;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return Exit::validation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "certificate parse error: " << e.what() << '\n';
    return Exit::certificate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::validation;
  }
  return Exit::ok;
}
