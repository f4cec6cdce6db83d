#pragma once

// The branching process behind the coin-tossing construction.
//
// Types are basic cells, environments are digit sequences. In environment
// digit theta a type-V individual has Binomial(B_theta(V, W), p) children of
// type W, independently. The same process appears geometrically as the
// M-ary tree of retained cylinders pushed onto L-adic cells.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ifs.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace cissifs {

/// Raised when a request exceeds a memory or work budget; carries the need.
struct BudgetError : std::length_error {
  BudgetError(const std::string& what, double required, double budget)
      : std::length_error(what + " (required " + short_num(required) + ", budget " + short_num(budget) + ")"),
        required(required),
        budget(budget) {}
  double required;
  double budget;

 private:
  static std::string short_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
  }
};

struct EnvWord {
  Word digits;
  std::string source = "fixed";

  static EnvWord fixed(Word w) { return EnvWord{std::move(w), "fixed"}; }

  static EnvWord periodic(const Word& period, std::size_t length) {
    if (period.empty()) throw std::invalid_argument("periodic environment needs a nonempty period");
    Word w(length);
    for (std::size_t i = 0; i < length; ++i) w[i] = period[i % period.size()];
    return EnvWord{std::move(w), "periodic" + to_string(period)};
  }

  /// Uniform i.i.d. digits.
  static EnvWord sampled(std::size_t alphabet, std::size_t length, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::uniform_int_distribution<Digit> pick(0, static_cast<Digit>(alphabet - 1));
    Word w(length);
    for (auto& d : w) d = pick(rng);
    return EnvWord{std::move(w), "sampled(" + std::to_string(seed) + ")"};
  }

  void check(std::size_t alphabet) const {
    for (Digit d : digits)
      if (d >= alphabet) throw std::out_of_range("environment digit " + std::to_string(d) + " out of range");
  }
};

struct PgfState {
  std::vector<double> s;  // s[i] = P(extinct by `depth` | one type-i ancestor)
  std::size_t depth = 0;
  bool converged = false;
};

inline void check_probability(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
}

/// Backward composition of offspring pgfs along the environment:
/// s <- 0; for t = depth..1: s_i <- prod_W (1 - p + p s_W)^{B_{theta_t}(i, W)}.
inline PgfState extinction_iterate(const CodingFamily& fam, double p, const EnvWord& env) {
  check_probability(p);
  env.check(fam.digits());
  const std::size_t n = fam.size();
  std::vector<double> s(n, 0.0), next(n);
  for (std::size_t t = env.digits.size(); t-- > 0;) {
    const auto& b = fam[env.digits[t]];
    for (std::size_t i = 0; i < n; ++i) {
      double prod = 1.0;
      for (std::size_t w = 0; w < n; ++w)
        if (b(i, w) > 0) prod *= std::pow(1.0 - p + p * s[w], static_cast<double>(b(i, w)));
      next[i] = prod;
    }
    std::swap(s, next);
  }
  return PgfState{std::move(s), env.digits.size(), false};
}

/// Extinction approximants along growing prefixes of `env`, stopping once the
/// largest change stays below `tol` for `patience` consecutive levels. The
/// result is always the finite-depth approximant, flagged if it settled.
inline PgfState extinction_limit(const CodingFamily& fam, double p, const EnvWord& env, double tol = 1e-12,
                                 std::size_t patience = 5) {
  PgfState prev = extinction_iterate(fam, p, EnvWord::fixed({}));
  std::size_t quiet = 0;
  for (std::size_t d = 1; d <= env.digits.size(); ++d) {
    EnvWord prefix = EnvWord::fixed(Word(env.digits.begin(), env.digits.begin() + static_cast<std::ptrdiff_t>(d)));
    PgfState cur = extinction_iterate(fam, p, prefix);
    double delta = 0.0;
    for (std::size_t i = 0; i < cur.s.size(); ++i) delta = std::max(delta, std::abs(cur.s[i] - prev.s[i]));
    quiet = delta < tol ? quiet + 1 : 0;
    prev = std::move(cur);
    if (quiet >= patience) {
      prev.converged = true;
      break;
    }
  }
  return prev;
}

struct PopulationTrajectory {
  std::vector<std::vector<std::int64_t>> counts;  // counts[n][type], n = 0..levels
  bool truncated = false;                         // total exceeded the cap
  bool extinct = false;

  std::int64_t total(std::size_t level) const {
    return std::accumulate(counts.at(level).begin(), counts.at(level).end(), std::int64_t{0});
  }
};

/// One run of the multitype process from a single ancestor of type `start`.
/// Sums of independent Binomial(B(V, W), p) over Z_V parents are drawn as a
/// single Binomial(Z_V * B(V, W), p).
inline PopulationTrajectory simulate_population(const CodingFamily& fam, double p, const EnvWord& env,
                                                std::size_t levels, SplitMix64& rng, std::int64_t cap = 1'000'000,
                                                std::size_t start = 0) {
  check_probability(p);
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  if (env.digits.size() < levels) throw std::invalid_argument("environment shorter than requested levels");
  env.check(fam.digits());
  const std::size_t n = fam.size();
  if (start >= n) throw std::out_of_range("start type out of range");
  PopulationTrajectory traj;
  std::vector<std::int64_t> z(n, 0);
  z[start] = 1;
  traj.counts.push_back(z);
  for (std::size_t t = 0; t < levels; ++t) {
    const auto& b = fam[env.digits[t]];
    std::vector<std::int64_t> next(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      if (z[v] == 0) continue;
      for (std::size_t w = 0; w < n; ++w) {
        if (b(v, w) == 0) continue;
        const std::int64_t trials = z[v] * b(v, w);
        if (p >= 1.0) {
          next[w] += trials;
        } else {
          std::binomial_distribution<std::int64_t> draw(trials, p);
          next[w] += draw(rng);
        }
      }
    }
    z = std::move(next);
    traj.counts.push_back(z);
    const auto tot = traj.total(traj.counts.size() - 1);
    if (tot == 0) {
      traj.extinct = true;
      break;
    }
    if (tot > cap) {
      traj.truncated = true;
      break;
    }
  }
  return traj;
}

inline PopulationTrajectory simulate_population(const CodingFamily& fam, double p, const EnvWord& env,
                                                std::size_t levels, std::uint64_t seed,
                                                std::int64_t cap = 1'000'000, std::size_t start = 0) {
  SplitMix64 rng(seed);
  return simulate_population(fam, p, env, levels, rng, cap, start);
}

struct ExtinctionFrequency {
  std::size_t runs = 0;
  std::size_t extinct = 0;
  std::size_t truncated = 0;  // counted as surviving

  double rate() const { return runs ? static_cast<double>(extinct) / static_cast<double>(runs) : 0.0; }
};

/// Replicated runs on independent streams of `seed`; a run that hits the cap counts as surviving.
inline ExtinctionFrequency extinction_frequency(const CodingFamily& fam, double p, const EnvWord& env,
                                                std::size_t depth, std::size_t runs, std::uint64_t seed,
                                                std::int64_t cap = 1'000'000, std::size_t start = 0) {
  auto outcomes = parallel_map<int>(runs, [&](std::size_t r) {
    SplitMix64 rng = SplitMix64::stream(seed, r);
    auto traj = simulate_population(fam, p, env, depth, rng, cap, start);
    return traj.extinct ? 1 : (traj.truncated ? 2 : 0);
  });
  ExtinctionFrequency f;
  f.runs = runs;
  for (int o : outcomes) {
    f.extinct += o == 1;
    f.truncated += o == 2;
  }
  return f;
}

struct PopulationMoments {
  std::vector<double> mean;
  std::vector<double> std_error;
};

/// Sample mean of Z_levels per type over independent runs (no cap).
inline PopulationMoments population_moments(const CodingFamily& fam, double p, const EnvWord& env,
                                            std::size_t levels, std::size_t runs, std::uint64_t seed,
                                            std::size_t start = 0) {
  const std::size_t n = fam.size();
  auto finals = parallel_map<std::vector<std::int64_t>>(runs, [&](std::size_t r) {
    SplitMix64 rng = SplitMix64::stream(seed, r);
    auto traj = simulate_population(fam, p, env, levels, rng, std::numeric_limits<std::int64_t>::max(), start);
    if (traj.extinct) return std::vector<std::int64_t>(n, 0);
    return traj.counts.back();
  });
  PopulationMoments m;
  m.mean.assign(n, 0.0);
  m.std_error.assign(n, 0.0);
  for (const auto& f : finals)
    for (std::size_t i = 0; i < n; ++i) m.mean[i] += static_cast<double>(f[i]);
  for (auto& x : m.mean) x /= static_cast<double>(runs);
  for (const auto& f : finals)
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(f[i]) - m.mean[i];
      m.std_error[i] += d * d;
    }
  for (auto& x : m.std_error) x = std::sqrt(x / static_cast<double>(runs - 1) / static_cast<double>(runs));
  return m;
}

/// e_start^T prod_t (p B_{theta_t}) over the first `levels` digits.
inline std::vector<double> expected_population(const CodingFamily& fam, double p, const EnvWord& env,
                                               std::size_t levels, std::size_t start = 0) {
  std::vector<double> v(fam.size(), 0.0);
  v.at(start) = 1.0;
  for (std::size_t t = 0; t < levels; ++t) {
    v = row_times(v, fam[env.digits.at(t)].cast<double>());
    for (auto& x : v) x *= p;
  }
  return v;
}

/// Retained nodes of the labelled M-ary tree, level by level.
/// Addresses are base-M integers with the first letter most significant.
struct Realization {
  std::vector<std::vector<std::uint64_t>> levels;  // levels[0] == {0}, the root
  std::size_t maps = 0;
  std::uint64_t seed = 0;
  double p = 1.0;

  std::size_t depth() const { return levels.empty() ? 0 : levels.size() - 1; }
  bool survived() const { return !levels.empty() && !levels.back().empty(); }
};

inline constexpr double kDefaultTreeBudget = 1 << 26;

/// Keeps each child independently with probability p, down to `depth`.
/// Refuses when the worst case M^depth exceeds `budget` nodes.
inline Realization simulate_tree(const IfsSpec& spec, double p, std::size_t depth, std::uint64_t seed,
                                 double budget = kDefaultTreeBudget) {
  check_probability(p);
  const double worst = std::pow(static_cast<double>(spec.maps()), static_cast<double>(depth));
  if (worst > budget) throw BudgetError("simulate_tree: M^depth exceeds node budget", worst, budget);
  Realization r;
  r.maps = spec.maps();
  r.seed = seed;
  r.p = p;
  r.levels.push_back({0});
  SplitMix64 rng(seed);
  const auto m = static_cast<std::uint64_t>(spec.maps());
  for (std::size_t n = 0; n < depth; ++n) {
    std::vector<std::uint64_t> next;
    for (std::uint64_t a : r.levels.back())
      for (std::uint64_t c = 0; c < m; ++c)
        if (p >= 1.0 || rng.uniform() < p) next.push_back(a * m + c);
    r.levels.push_back(std::move(next));
  }
  return r;
}

/// Every retained node's parent is retained on the level above.
inline bool prefix_closed(const Realization& r) {
  if (r.levels.empty() || r.levels[0] != std::vector<std::uint64_t>{0}) return false;
  for (std::size_t n = 1; n < r.levels.size(); ++n) {
    const auto& up = r.levels[n - 1];
    for (std::uint64_t a : r.levels[n])
      if (!std::binary_search(up.begin(), up.end(), a / r.maps)) return false;
  }
  return true;
}

/// Cylinder multiplicity on the level-n L-adic grid of side L^(1-n) covering
/// [0, slots*L)^d, in units where basic cell b spans [b*L^n, (b+1)*L^n).
struct CoverageGrid {
  int dimension = 1;
  std::size_t extent = 0;  // cells per axis
  std::vector<std::uint32_t> counts;

  std::size_t covered() const {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
  }
  std::uint32_t max_count() const { return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end()); }
  std::uint32_t at(const std::vector<std::size_t>& pos) const {
    std::size_t idx = 0;
    for (auto x : pos) idx = idx * extent + x;
    return counts.at(idx);
  }
};

inline constexpr double kDefaultGridBudget = 1 << 26;

inline CoverageGrid coverage_grid(const Realization& r, const CodingFamily& fam, std::size_t level,
                                  double budget = kDefaultGridBudget) {
  if (!fam.spec || !fam.basics) throw std::invalid_argument("coverage needs a family built from an IFS");
  const IfsSpec& spec = *fam.spec;
  if (spec.maps() != r.maps) throw std::invalid_argument("realization and family come from different IFSs");
  if (level > r.depth()) throw std::out_of_range("level beyond realization depth");
  const auto base = static_cast<std::uint64_t>(spec.base);
  std::uint64_t scale = 1;  // L^level
  for (std::size_t i = 0; i < level; ++i) scale *= base;
  CoverageGrid g;
  g.dimension = spec.dimension;
  g.extent = static_cast<std::size_t>(spec.slots()) * scale;
  const double cells = std::pow(static_cast<double>(g.extent), spec.dimension);
  if (cells > budget) throw BudgetError("coverage grid exceeds cell budget", cells, budget);
  g.counts.assign(static_cast<std::size_t>(cells), 0);

  const auto d = static_cast<std::size_t>(spec.dimension);
  std::vector<std::size_t> letters(level);
  std::vector<std::uint64_t> offset(d);
  for (std::uint64_t a : r.levels[level]) {
    std::uint64_t rest = a;
    for (std::size_t i = level; i-- > 0;) {
      letters[i] = static_cast<std::size_t>(rest % r.maps);
      rest /= r.maps;
    }
    std::fill(offset.begin(), offset.end(), 0);
    for (std::size_t i = 0; i < level; ++i)
      for (std::size_t j = 0; j < d; ++j)
        offset[j] = offset[j] * base + static_cast<std::uint64_t>(spec.translations[letters[i]][j]);
    for (const auto& b : fam.basics->cells) {
      std::size_t idx = 0;
      for (std::size_t j = 0; j < d; ++j) {
        // left corner of S_a(J^V) in units of L^(1-level): b_V + sum_k t_{i_k} L^(level-k)
        const std::uint64_t pos = static_cast<std::uint64_t>(b[j]) + offset[j];
        idx = idx * g.extent + static_cast<std::size_t>(pos);
      }
      ++g.counts[idx];
    }
  }
  return g;
}

struct LevelCoverage {
  std::size_t level = 0;
  std::size_t retained = 0;     // cylinders
  std::size_t covered = 0;      // distinct grid cells
  double lebesgue_proxy = 0.0;  // covered / (N * L^(d*level))
  double interior_side = 0.0;   // side of the largest fully covered aligned L-adic block, 0 if none
};

namespace detail {
inline bool block_full(const CoverageGrid& g, std::vector<std::size_t>& corner, std::size_t side, std::size_t axis) {
  if (axis == corner.size()) return g.at(corner) > 0;
  const std::size_t start = corner[axis];
  for (std::size_t x = start; x < start + side; ++x) {
    corner[axis] = x;
    if (!block_full(g, corner, side, axis + 1)) {
      corner[axis] = start;
      return false;
    }
  }
  corner[axis] = start;
  return true;
}
}  // namespace detail

inline double largest_full_block(const CoverageGrid& g, std::int64_t base, std::size_t level) {
  const auto d = static_cast<std::size_t>(g.dimension);
  const double unit = std::pow(static_cast<double>(base), 1.0 - static_cast<double>(level));
  for (std::size_t k = level + 1; k-- > 0;) {
    std::size_t side = 1;
    for (std::size_t i = 0; i < k; ++i) side *= static_cast<std::size_t>(base);
    if (side > g.extent) continue;
    const std::size_t blocks = g.extent / side;
    std::size_t total = 1;
    for (std::size_t j = 0; j < d; ++j) total *= blocks;
    std::vector<std::size_t> corner(d);
    for (std::size_t b = 0; b < total; ++b) {
      std::size_t rest = b;
      for (std::size_t j = d; j-- > 0;) {
        corner[j] = (rest % blocks) * side;
        rest /= blocks;
      }
      if (detail::block_full(g, corner, side, 0)) return static_cast<double>(side) * unit;
    }
  }
  return 0.0;
}

inline std::vector<LevelCoverage> coverage_stats(const Realization& r, const CodingFamily& fam,
                                                 double budget = kDefaultGridBudget) {
  std::vector<LevelCoverage> out;
  const IfsSpec& spec = fam.spec.value();
  for (std::size_t n = 0; n <= r.depth(); ++n) {
    CoverageGrid g = coverage_grid(r, fam, n, budget);
    LevelCoverage c;
    c.level = n;
    c.retained = r.levels[n].size();
    c.covered = g.covered();
    const double total = static_cast<double>(fam.size()) *
                         std::pow(static_cast<double>(spec.base), static_cast<double>(spec.dimension * n));
    c.lebesgue_proxy = static_cast<double>(c.covered) / total;
    c.interior_side = c.covered ? largest_full_block(g, spec.base, n) : 0.0;
    out.push_back(c);
  }
  return out;
}

inline std::string coverage_csv(const std::vector<LevelCoverage>& stats) {
  std::ostringstream os;
  os.precision(17);
  os << "level,retained,covered,lebesgue_proxy,interior_side\n";
  for (const auto& c : stats)
    os << c.level << ',' << c.retained << ',' << c.covered << ',' << c.lebesgue_proxy << ',' << c.interior_side
       << '\n';
  return os.str();
}

/// Box-counting dimension of the retained cylinder tree: least-squares slope
/// of log(retained count) against level over the upper half of the levels,
/// divided by log L. Empty when the realization died out.
inline std::optional<double> dimension_estimate(const Realization& r, std::int64_t base) {
  if (!r.survived()) return std::nullopt;
  if (r.depth() < 8) throw std::invalid_argument("dimension_estimate needs depth >= 8");
  const std::size_t first = (r.depth() + 1) / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
  for (std::size_t n = first; n <= r.depth(); ++n) {
    const double x = static_cast<double>(n);
    const double y = std::log(static_cast<double>(r.levels[n].size()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    k += 1;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return slope / std::log(static_cast<double>(base));
}

inline std::string trajectory_csv(const PopulationTrajectory& t) {
  std::ostringstream os;
  os << "level";
  const std::size_t n = t.counts.empty() ? 0 : t.counts.front().size();
  for (std::size_t i = 0; i < n; ++i) os << ",type" << i;
  os << '\n';
  for (std::size_t l = 0; l < t.counts.size(); ++l) {
    os << l;
    for (auto c : t.counts[l]) os << ',' << c;
    os << '\n';
  }
  return os.str();
}

}  // namespace cissifs
