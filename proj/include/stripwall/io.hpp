#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include <stripwall/energy.hpp>
#include <stripwall/grid.hpp>

namespace stripwall {

// Field files: CSV with header "x,y,theta", rows ordered by y then x, values
// printed with 17 significant digits, plus a JSON sidecar {M, nx, ny}.
// Sidecar path is the CSV path with ".json" appended.
void write_field(const std::filesystem::path& csv, const ScalarField& field);
ScalarField read_field(const std::filesystem::path& csv);

// Trace files: CSV "x,theta" plus sidecar {window: [a, b], spacing}.
void write_trace(const std::filesystem::path& csv, const Trace& trace);
Trace read_trace(const std::filesystem::path& csv);

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

// Shortest round-trip decimal form with 17 significant digits.
std::string format17(double v);

nlohmann::json to_json(const EnergyBreakdown& e);
EnergyBreakdown energy_from_json(const nlohmann::json& j);

}  // namespace stripwall
