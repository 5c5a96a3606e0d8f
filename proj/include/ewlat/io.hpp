#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewlat/params.hpp"
#include "ewlat/lattice.hpp"

namespace ewlat {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a CLI run needs; serializes back to the JSON it was read from
/// (with defaults filled in).
struct RunConfig {
  nlohmann::json params_block = {{"M_W", 80.379}, {"M_Z", 91.1876}, {"M_H", 125.09}, {"n", 1}};
  int grid_n = 64;
  int theta_truncation = 0;  // 0 keeps the default
  cplx tau{0.5, 0.8660254037844386};

  // eta-map
  int scan_resolution = 40;
  double scan_im_max = 2.0;
  double refine_tol = 1e-4;

  // branch
  std::vector<double> omegas{0.005, 0.01, 0.02};
  int branch_levels = 32;
  int branch_grid_n = 32;
  int branch_max_iter = 40;
  double branch_tol = 1e-10;

  // spectrum
  std::string spectrum_op = "magnetic_laplacian";  // or "h1"
  int spectrum_count = 10;
  double b_ratio = 1.25;  // b / b_star for h1
  bool extrapolate = false;

  std::string out_dir = "out";
  std::uint64_t seed = 20240917;
  int workers = 0;  // 0 = hardware concurrency
  std::map<std::string, double> tolerances;

  PhysParams params() const;
  /// Resolved worker count: EWLAT_WORKERS overrides the config value.
  int resolved_workers() const;
  double tolerance(const std::string& key, double fallback) const;
};

/// Throws ValidationError on unknown keys, wrong types or invalid values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

/// Builds params from a `{"M_W","M_Z","M_H","n"}` or `{"g","gprime","lambda","phi0","n"}` block.
PhysParams params_from_json(const nlohmann::json& block);

/// Hex SHA-256 of a string.
std::string sha256_hex(const std::string& data);
/// SHA-256 of the canonical (sorted-key, compact) config JSON.
std::string config_hash(const RunConfig& c);

/// 17 significant digits.
std::string fmt17(double x);

/// Writes `<file>.manifest.json` next to an emitted file.
void write_manifest(const std::filesystem::path& file, const RunConfig& c, const nlohmann::json& tolerances,
                    const std::string& command);

/// Writes rows of numbers as CSV with a header, 17 significant digits.
void write_csv_table(const std::filesystem::path& file, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// Writes pretty JSON.
void write_json(const std::filesystem::path& file, const nlohmann::json& j);

}  // namespace ewlat
