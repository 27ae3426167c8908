#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "trellis/trellis.hpp"

namespace trellis {

// Line-oriented text format:
//
//   trellis rank=<n>
//   v <id> depth=<i>
//   e <id> <init> <fin> lambda=<value> clabel=<value>
//
// Blank lines and lines starting with '#' are ignored. Ids in the file are
// labels; after reading, ids are renumbered densely layer by layer, and the
// writer always emits canonical ids so output re-reads identically.

Trellis read_trellis(std::istream& in);
void write_trellis(std::ostream& out, const Trellis& trellis);

Trellis load_trellis(const std::filesystem::path& path);
void save_trellis(const std::filesystem::path& path, const Trellis& trellis);

/// Shortest decimal that round-trips (at most 17 significant digits).
std::string format_real(double value);
double parse_real(std::string_view text);

/// One real per line; blank lines and '#' comments skipped.
std::vector<double> read_reals(std::istream& in);
std::vector<double> load_reals(const std::filesystem::path& path);
void write_reals(std::ostream& out, const std::vector<double>& values);

} // namespace trellis
