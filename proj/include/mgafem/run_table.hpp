#pragma once

#include "mgafem/driver.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mgafem {

/// Level history as stored in a run CSV.
struct RunTable {
    int num_goals = 0;
    std::vector<LevelRecord> levels;
};

std::string csv_header(int num_goals);

/// One header row, one row per level, LF line ends; floats in shortest
/// round-trip form, unknown zeta values as "nan".
void write_csv(std::ostream& out, std::span<const LevelRecord> levels, int num_goals);
std::string to_csv(std::span<const LevelRecord> levels, int num_goals);

/// Parses a run CSV. zeta_fresh is rebuilt from active_goal (and from every
/// finite zeta on the first level). Throws InputError naming the line.
RunTable read_csv(std::istream& in, std::string_view source = "<csv>");
RunTable load_csv(const std::string& path);

}  // namespace mgafem
