#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bcl/mdp.hpp"

namespace bcl {

inline constexpr std::string_view kMdpFormatVersion = "bcl-mdp-v1";

/// Serializes to the bcl-mdp-v1 JSON document. Reals are written with
/// round-trip precision, so load(dump(m)) == m bit for bit.
std::string mdp_to_json(const TabularMDP& mdp);

/// Parses a bcl-mdp-v1 document. Unknown versions, missing fields and
/// invariant violations raise ArgumentError.
TabularMDP mdp_from_json(std::string_view text);

void save_mdp(const TabularMDP& mdp, const std::filesystem::path& path);
TabularMDP load_mdp(const std::filesystem::path& path);

}  // namespace bcl
