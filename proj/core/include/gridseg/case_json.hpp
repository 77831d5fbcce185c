#pragma once

#include <nlohmann/json.hpp>

#include "gridseg/grid_case.hpp"

namespace gridseg {

/// Canonical JSON dump of a case:
///
///     {"name": str, "baseMVA": num,
///      "buses":      [{"id","type":"PQ"|"PV"|"slack","Pd","Qd","Gs","Bs",
///                      "Vm","Va_rad","baseKV","area"}],
///      "branches":   [{"index","from","to","r","x","b","tap","shift_rad",
///                      "in_service"}],
///      "generators": [{"bus","Pg","Qg","Vg","in_service"}]}
///
/// Doubles are written with round-trip precision, so case_from_json(to_json(c)) == c.
nlohmann::json to_json(const GridCase& grid);
GridCase case_from_json(const nlohmann::json& doc);

} // namespace gridseg
