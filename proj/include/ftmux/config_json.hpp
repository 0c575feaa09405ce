#pragma once

// JSON form of SetupConfig. Field names mirror the struct; unknown keys are
// rejected. Keys that are absent keep the OneLoopDefault preset values.

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "ftmux/config.hpp"
#include "json.hpp"

namespace ftmux {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read_if_present(const nlohmann::json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::json to_json(const LossTable& t) {
  nlohmann::json loops = nlohmann::json::object();
  for (const auto& [len, db] : t.loop_pass) loops[std::to_string(len)] = db;
  return {
      {"loop_pass", loops},
      {"fbg_transmission", t.fbg_transmission},
      {"fbg_reflection", t.fbg_reflection},
      {"fiber_per_timestep", t.fiber_per_timestep},
      {"circulator_pass", t.circulator_pass},
      {"misc", t.misc},
  };
}

inline nlohmann::json to_json(const SetupConfig& c) {
  return {
      {"p", c.p},
      {"m", c.m},
      {"n", c.n},
      {"t_bin", c.t_bin},
      {"variant", std::string(to_string(c.variant))},
      {"loop_lengths", c.loop_lengths},
      {"occupancy", std::string(to_string(c.occupancy))},
      {"loss_table", to_json(c.loss_table)},
  };
}

inline LossTable loss_table_from_json(const nlohmann::json& j, LossTable base) {
  detail::reject_unknown_keys(
      j, {"loop_pass", "fbg_transmission", "fbg_reflection", "fiber_per_timestep", "circulator_pass", "misc"},
      "loss_table");
  if (j.contains("loop_pass")) {
    const auto& loops = j.at("loop_pass");
    if (!loops.is_object()) throw ConfigError("loss_table.loop_pass must be an object keyed by loop length");
    base.loop_pass.clear();
    for (const auto& item : loops.items()) {
      std::size_t used = 0;
      int len = 0;
      try {
        len = std::stoi(item.key(), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.key().size()) throw ConfigError("loop_pass key '" + item.key() + "' is not an integer");
      base.loop_pass[len] = item.value().get<double>();
    }
  }
  detail::read_if_present(j, "fbg_transmission", base.fbg_transmission);
  detail::read_if_present(j, "fbg_reflection", base.fbg_reflection);
  detail::read_if_present(j, "fiber_per_timestep", base.fiber_per_timestep);
  detail::read_if_present(j, "circulator_pass", base.circulator_pass);
  detail::read_if_present(j, "misc", base.misc);
  return base;
}

/// Parses and validates a config document. Throws ConfigError on any problem.
inline SetupConfig config_from_json(const nlohmann::json& j) {
  SetupConfig c = preset(Preset::OneLoopDefault);
  try {
    detail::reject_unknown_keys(j, {"p", "m", "n", "t_bin", "variant", "loop_lengths", "occupancy", "loss_table"},
                                "config");
    detail::read_if_present(j, "p", c.p);
    detail::read_if_present(j, "m", c.m);
    detail::read_if_present(j, "n", c.n);
    detail::read_if_present(j, "t_bin", c.t_bin);
    detail::read_if_present(j, "loop_lengths", c.loop_lengths);
    if (j.contains("variant")) c.variant = variant_from_name(j.at("variant").get<std::string>());
    if (j.contains("occupancy")) c.occupancy = occupancy_from_name(j.at("occupancy").get<std::string>());
    if (j.contains("loss_table")) c.loss_table = loss_table_from_json(j.at("loss_table"), c.loss_table);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

inline SetupConfig config_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline SetupConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_string(buf.str());
}

}  // namespace ftmux
