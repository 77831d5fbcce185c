#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gridseg/grid_case.hpp"

namespace gridseg {

/// Parses MATPOWER version-2 case text. Only `baseMVA`, `bus`, `gen` and
/// `branch` are read; other assignments (gencost, bus_name, areas, ...) are
/// skipped. Columns beyond those needed are ignored. Throws ParseError.
GridCase parse_matpower(std::string_view text, std::string name = {});

/// Reads and parses a case file. The case name defaults to the MATPOWER
/// function name, or the file stem when there is none.
GridCase load_matpower(const std::filesystem::path& path);

} // namespace gridseg
