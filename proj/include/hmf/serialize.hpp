// CSV, JSON and HMF1 snapshot output; SHA-256 checksums.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmf/spectral_core.hpp"

namespace hmf {

using json = nlohmann::ordered_json;

/// %.17g
std::string format_real(double v);

/// Writes a header line and one row per entry, every value at 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Pretty-printed JSON with a trailing newline. Non-finite numbers become null.
void write_json(const std::filesystem::path& path, const json& value);

/// Finite numbers pass through; NaN and infinities become null.
json number_or_null(double v);

/// Binary layout, all little-endian:
///   "HMF1", int64 snapshot count, int64 modes (2 n_max + 1), int64 xi nodes,
///   then per snapshot, per mode n = -n_max..n_max, per xi node: re, im as float64.
void write_snapshots(const std::filesystem::path& path, const std::vector<FourierField>& snapshots);

/// Sidecar describing the grid and snapshot times of an HMF1 file.
json snapshot_sidecar(const Grid& grid, const std::vector<double>& times, const std::string& binary_name);

/// Reads an HMF1 file back onto grid. Throws std::runtime_error on a malformed header or size mismatch.
std::vector<FourierField> read_snapshots(const std::filesystem::path& path, const Grid& grid);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Writes to path + ".tmp" then renames over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hmf
