#pragma once
// Sweep description files: INI syntax with [world], [model], [task] and
// [sweep] sections. Only task.name is required; see docs/config.md.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmcomm/harness.hpp"

namespace swarmcomm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

inline std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

inline std::size_t to_count(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d)) throw ConfigError(key + ": expected a non-negative integer: '" + v + "'");
  return static_cast<std::size_t>(d);
}

inline std::uint64_t to_seed(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected an unsigned 64-bit integer: '" + v + "'");
  return out;
}

}  // namespace detail

/// "metric", "visual", "topological" (n_top 7) or "topological:K".
inline ModelLevel parse_model_level(const std::string& text) {
  const std::string s = detail::trim(text);
  const auto colon = s.find(':');
  const auto kind = parse_model_kind(s.substr(0, colon));
  if (!kind) throw ConfigError("unknown model '" + s + "'");
  ModelLevel m{*kind, 7};
  if (colon != std::string::npos) {
    if (*kind != ModelKind::Topological) throw ConfigError("only the topological model takes ':n_top'");
    m.n_top = detail::to_count("n_top", s.substr(colon + 1));
    if (m.n_top == 0) throw ConfigError("n_top must be positive");
  }
  return m;
}

/// Reads a design from INI text. [sweep] preset selects the starting grid
/// ("full" or "desk"); every other key overrides one part of it.
/// `fallback_task` stands in for a missing task.name.
inline DesignSpec parse_design(std::istream& in, std::optional<TaskKind> fallback_task = std::nullopt) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  static const std::map<std::string, std::vector<std::string>> known = {
      {"world", {"width", "height", "wall_margin", "steer_offset", "obstacle_radius"}},
      {"model", {"levels", "phi", "d_vis", "speed", "max_turn", "body_radius", "w_env", "w_swarm"}},
      {"task", {"name", "factor1", "factor2", "omega", "leader_sigma", "iterations"}},
      {"sweep", {"preset", "n", "r_r", "ro_mult", "ra_mult", "replicates", "scale", "seed"}},
  };
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body)
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError("unknown key " + section + "." + key);
  }

  const auto get = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '.')); };

  const auto task_name_v = get("task.name");
  if (!task_name_v && !fallback_task) throw ConfigError("task.name is required");
  const auto kind = task_name_v ? parse_task_kind(detail::trim(*task_name_v)) : fallback_task;
  if (!kind) throw ConfigError("unknown task '" + *task_name_v + "'");

  const std::string preset = detail::trim(get("sweep.preset").value_or("full"));
  DesignSpec d;
  if (preset == "full") d = full_design(*kind);
  else if (preset == "desk") d = desk_design(*kind);
  else throw ConfigError("sweep.preset must be 'full' or 'desk'");

  SimParams& s = d.sim;
  if (auto v = get("world.width")) s.world_width = detail::to_double("world.width", *v);
  if (auto v = get("world.height")) s.world_height = detail::to_double("world.height", *v);
  if (auto v = get("world.wall_margin")) s.wall_margin = detail::to_double("world.wall_margin", *v);
  if (auto v = get("world.steer_offset")) s.steer_offset = detail::to_double("world.steer_offset", *v);
  if (auto v = get("world.obstacle_radius")) s.obstacle_radius = detail::to_double("world.obstacle_radius", *v);

  if (auto v = get("model.levels")) {
    d.models.clear();
    for (const auto& item : detail::split_list(*v)) d.models.push_back(parse_model_level(item));
    if (d.models.empty()) throw ConfigError("model.levels: empty list");
  }
  if (auto v = get("model.phi")) s.phi = detail::to_double("model.phi", *v);
  if (auto v = get("model.d_vis")) s.d_vis = detail::to_double("model.d_vis", *v);
  if (auto v = get("model.speed")) s.speed = detail::to_double("model.speed", *v);
  if (auto v = get("model.max_turn")) s.max_turn = detail::to_double("model.max_turn", *v);
  if (auto v = get("model.body_radius")) s.body_radius = detail::to_double("model.body_radius", *v);
  if (auto v = get("model.w_env")) s.weights.env = detail::to_double("model.w_env", *v);
  if (auto v = get("model.w_swarm")) s.weights.swarm = detail::to_double("model.w_swarm", *v);

  if (auto v = get("task.factor1")) d.factor1 = detail::to_doubles("task.factor1", *v);
  if (auto v = get("task.factor2")) d.factor2 = detail::to_doubles("task.factor2", *v);
  if (auto v = get("task.omega")) s.omega = detail::to_double("task.omega", *v);
  if (auto v = get("task.leader_sigma")) s.leader_sigma = detail::to_double("task.leader_sigma", *v);
  if (auto v = get("task.iterations")) d.iterations = detail::to_count("task.iterations", *v);

  if (auto v = get("sweep.n")) {
    d.n_levels.clear();
    for (const auto& item : detail::split_list(*v)) d.n_levels.push_back(detail::to_count("sweep.n", item));
    if (d.n_levels.empty()) throw ConfigError("sweep.n: empty list");
  }
  if (auto v = get("sweep.r_r")) d.r_r_levels = detail::to_doubles("sweep.r_r", *v);
  if (auto v = get("sweep.ro_mult")) d.r_o_mult = detail::to_doubles("sweep.ro_mult", *v);
  if (auto v = get("sweep.ra_mult")) d.r_a_mult = detail::to_doubles("sweep.ra_mult", *v);
  if (auto v = get("sweep.replicates")) d.replicates = detail::to_count("sweep.replicates", *v);
  if (auto v = get("sweep.scale")) d.scale = detail::to_double("sweep.scale", *v);
  if (auto v = get("sweep.seed")) d.base_seed = detail::to_seed("sweep.seed", *v);

  if (!(s.max_turn > 0.0)) throw ConfigError("model.max_turn must be positive");
  if (!(s.speed >= 0.0)) throw ConfigError("model.speed must be non-negative");
  if (!(s.wall_margin >= 0.0)) throw ConfigError("world.wall_margin must be non-negative");
  return d;
}

inline DesignSpec load_design(const std::string& path, std::optional<TaskKind> fallback_task = std::nullopt) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  return parse_design(f, fallback_task);
}

}  // namespace swarmcomm
