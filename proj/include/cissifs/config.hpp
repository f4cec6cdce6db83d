#pragma once

// YAML configuration for an analysis run.
//
//   name: gasket
//   dimension: 1
//   base: 2
//   translations: [0, 1, 2]            # or [[0,0], [0,1], ...] when dimension >= 2
//   matrices: [[[2]]]                  # alternative to an IFS: a raw family
//   p: 0.7                             # optional query probability
//   uset: [[1,0,1,0], [0,1,0,1]]       # optional vector family for interior checks
//   seed: 1
//   budgets: { bracket_length: 12, lsr_length: 10, ... }

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "ifs.hpp"

namespace cissifs {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line + 1) + ": " + what : what), line(line) {}
  int line;  // zero-based, -1 when unknown
};

struct Budgets {
  std::size_t bracket_length = 12;  // Lyapunov word length m
  std::size_t lsr_length = 10;      // lower spectral radius word length n
  std::size_t pressure_length = 10;
  std::size_t interior_length = 8;  // maxS
  std::size_t tree_depth = 12;
  std::size_t mc_steps = 200'000;
  std::size_t typicality_length = 2;
  std::size_t goodness_length = 16;
};

struct Config {
  std::string name;
  std::optional<IfsSpec> spec;
  std::optional<std::vector<IntMatrix>> matrices;
  std::optional<double> p;
  std::optional<std::vector<IntVec>> uset;
  std::uint64_t seed = 1;
  Budgets budgets;

  CodingFamily family() const {
    if (spec) return coding_matrices(*spec);
    return CodingFamily::from_matrices(*matrices);
  }
};

namespace detail {

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("key '" + key + "' has the wrong type", n.Mark().line);
  }
}

inline std::vector<IntVec> int_rows(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ConfigError("key '" + key + "' must be a list", n.Mark().line);
  std::vector<IntVec> rows;
  for (const auto& item : n) {
    if (item.IsScalar()) {
      rows.push_back({scalar<std::int64_t>(item, key)});
    } else if (item.IsSequence()) {
      IntVec row;
      for (const auto& x : item) row.push_back(scalar<std::int64_t>(x, key));
      rows.push_back(std::move(row));
    } else {
      throw ConfigError("key '" + key + "' must hold integers or integer lists", item.Mark().line);
    }
  }
  return rows;
}

}  // namespace detail

inline Config parse_config(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("config must be a mapping", root.Mark().line);
  static const std::vector<std::string> known = {"name", "dimension", "base",  "translations", "matrices",
                                                 "p",    "uset",      "seed",  "budgets"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown key '" + key + "'", kv.first.Mark().line);
  }
  Config c;
  if (root["name"]) c.name = detail::scalar<std::string>(root["name"], "name");
  const bool has_ifs = static_cast<bool>(root["translations"]);
  const bool has_mats = static_cast<bool>(root["matrices"]);
  if (has_ifs == has_mats) throw ConfigError("exactly one of 'translations' or 'matrices' is required", root.Mark().line);
  if (has_ifs) {
    const int dim = root["dimension"] ? detail::scalar<int>(root["dimension"], "dimension") : 1;
    if (!root["base"]) throw ConfigError("missing key 'base'", root.Mark().line);
    const auto base = detail::scalar<std::int64_t>(root["base"], "base");
    auto ts = detail::int_rows(root["translations"], "translations");
    try {
      c.spec = validate_ifs(dim, base, std::move(ts), c.name);
    } catch (const IfsValidationError& e) {
      throw ConfigError(e.what(), root["translations"].Mark().line);
    }
  } else {
    const auto& node = root["matrices"];
    if (!node.IsSequence()) throw ConfigError("key 'matrices' must be a list of matrices", node.Mark().line);
    std::vector<IntMatrix> mats;
    for (const auto& m : node) {
      auto rows = detail::int_rows(m, "matrices");
      IntMatrix mat(rows.size(), rows.empty() ? 0 : rows.front().size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != mat.cols()) throw ConfigError("ragged matrix", m.Mark().line);
        for (std::size_t j = 0; j < rows[i].size(); ++j) mat(i, j) = rows[i][j];
      }
      mats.push_back(std::move(mat));
    }
    try {
      (void)CodingFamily::from_matrices(mats);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), node.Mark().line);
    }
    c.matrices = std::move(mats);
  }
  if (root["p"]) {
    c.p = detail::scalar<double>(root["p"], "p");
    if (!(*c.p > 0.0 && *c.p <= 1.0)) throw ConfigError("p must lie in (0, 1]", root["p"].Mark().line);
  }
  if (root["uset"]) c.uset = detail::int_rows(root["uset"], "uset");
  if (root["seed"]) c.seed = detail::scalar<std::uint64_t>(root["seed"], "seed");
  if (const auto& b = root["budgets"]) {
    if (!b.IsMap()) throw ConfigError("key 'budgets' must be a mapping", b.Mark().line);
    auto& bud = c.budgets;
    const std::vector<std::pair<std::string, std::size_t*>> fields = {
        {"bracket_length", &bud.bracket_length},   {"lsr_length", &bud.lsr_length},
        {"pressure_length", &bud.pressure_length}, {"interior_length", &bud.interior_length},
        {"tree_depth", &bud.tree_depth},           {"mc_steps", &bud.mc_steps},
        {"typicality_length", &bud.typicality_length}, {"goodness_length", &bud.goodness_length}};
    for (const auto& kv : b) {
      const auto key = kv.first.as<std::string>();
      auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
      if (it == fields.end()) throw ConfigError("unknown budget '" + key + "'", kv.first.Mark().line);
      *it->second = detail::scalar<std::size_t>(kv.second, key);
    }
  }
  return c;
}

inline Config parse_config_string(const std::string& text) {
  try {
    return parse_config(YAML::Load(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line);
  }
}

inline Config load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read " + path, -1);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line);
  }
  return parse_config(root);
}

}  // namespace cissifs
