#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "reach/model.hpp"

namespace reach {

// Text format:
//   mdp
//   states <N>
//   init <id>
//   goal <id>
//   sink <id>            (optional; a fresh absorbing state is added if absent)
//   action <state> <label>
//   <successor> <probability>   (one or more lines per action)
// '#' starts a comment.
RawModel parse_raw_model(std::string_view text);
Mdp parse_model(std::string_view text);
std::string serialize_model(const Mdp& mdp);

Mdp read_model_file(const std::filesystem::path& path);
void write_model_file(const std::filesystem::path& path, const Mdp& mdp);

// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace reach
