#pragma once
// JSON document format for MDPs:
//   {"num_states": S, "num_actions": A,
//    "rewards": [[r(s,a) for a] for s],
//    "transitions": [[[p(s'|s,a) for s'] for a] for s]}
// Numbers are written with 17 significant digits.

#include "oams/mdp.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace oams {

nlohmann::json to_json(const Mdp& m);

/// Validates shape and rows; a row off by more than 1e-9 is reported with its (s, a).
Mdp mdp_from_json(const nlohmann::json& doc);

std::string mdp_to_text(const Mdp& m);

Mdp load_mdp(const std::filesystem::path& path);
void save_mdp(const Mdp& m, const std::filesystem::path& path);

/// Writes `value` to `path`, throwing IoError with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& value);
std::string read_text_file(const std::filesystem::path& path);

/// Fixed 17-significant-digit rendering used by every emitted number.
std::string format_real(double x);

} // namespace oams
