#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "terracelab/front.hpp"
#include "terracelab/nonlinearity.hpp"
#include "terracelab/radial_pde.hpp"

namespace terracelab::io {

using json = nlohmann::ordered_json;

// Round-trippable decimal text ("%.17g").
std::string fmt(double x);

// FNV-1a 64-bit digest, hex encoded; used to tag outputs with the reaction term.
std::string fnv1a64_hex(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

// Column-major table: columns[k][i] is row i of column k.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);
// Rows of numbers; the header line (if any) is skipped, '#' lines are ignored.
std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path);

// Two columns (z, U) preceded by one "# {json}" line with c, q_top, q_bot, residual.
void write_profile_csv(const std::filesystem::path& path, const WaveProfile& w, double residual);
WaveProfile read_profile_csv(const std::filesystem::path& path);

// Snapshot matrix (rows = times, first column t, then one column per node) as CSV
// or little-endian float64 binary, plus a JSON sidecar <stem>.json.
void write_trajectory(const std::filesystem::path& dir, const std::string& stem, const RadialTrajectory& traj,
                      const ReactionTerm& f, const std::string& format);
RadialTrajectory read_trajectory(const std::filesystem::path& dir, const std::string& stem);

json grid_json(const RadialGrid& g);
std::string scheme_name(Scheme s);

}  // namespace terracelab::io
