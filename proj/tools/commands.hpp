#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace cli {

void cmd_spectrum(const RunConfig& rc, const std::filesystem::path& out);
void cmd_wavepacket(const RunConfig& rc, const std::filesystem::path& out);
void cmd_map(const RunConfig& rc, const std::filesystem::path& out);
void cmd_ratios(const RunConfig& rc, const std::filesystem::path& out);
void cmd_fit(const RunConfig& rc, const std::vector<std::string>& inputs,
             const std::filesystem::path& out);
void cmd_validate(const RunConfig& rc, std::ostream& os);

}  // namespace cli
