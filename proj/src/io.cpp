#include "ewlat/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

namespace ewlat {

using nlohmann::json;

namespace {

template <class T>
T get(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ValidationError("unknown key '" + it.key() + "' in " + where);
}

}  // namespace

PhysParams params_from_json(const json& b) {
  if (!b.is_object()) throw ValidationError("params block must be a JSON object");
  const int n = get<int>(b, "n", 1);
  const bool masses = b.contains("M_W") || b.contains("M_Z") || b.contains("M_H");
  const bool couplings = b.contains("g") || b.contains("gprime") || b.contains("lambda") || b.contains("phi0");
  if (masses == couplings)
    throw ValidationError("params block needs either {M_W, M_Z, M_H, n} or {g, gprime, lambda, phi0, n}");
  if (masses) {
    reject_unknown(b, {"M_W", "M_Z", "M_H", "n"}, "params");
    for (const char* k : {"M_W", "M_Z", "M_H"})
      if (!b.contains(k)) throw ValidationError(std::string("params block is missing ") + k);
    return from_masses(get<double>(b, "M_W", 0), get<double>(b, "M_Z", 0), get<double>(b, "M_H", 0), n);
  }
  reject_unknown(b, {"g", "gprime", "lambda", "phi0", "n"}, "params");
  for (const char* k : {"g", "gprime", "lambda"})
    if (!b.contains(k)) throw ValidationError(std::string("params block is missing ") + k);
  return from_couplings(get<double>(b, "g", 0), get<double>(b, "gprime", 0), get<double>(b, "lambda", 0),
                        get<double>(b, "phi0", 1.0), n);
}

PhysParams RunConfig::params() const { return params_from_json(params_block); }

int RunConfig::resolved_workers() const {
  if (const char* env = std::getenv("EWLAT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) throw ValidationError("EWLAT_WORKERS must be a non-negative integer");
    if (v > 0) return int(v);
  }
  if (workers > 0) return workers;
  return int(std::max(1u, std::thread::hardware_concurrency()));
}

double RunConfig::tolerance(const std::string& key, double fallback) const {
  const auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

RunConfig parse_config(const json& j) {
  reject_unknown(j, {"params", "grid_n", "theta_truncation", "tau", "scan", "omegas", "branch", "spectrum",
                     "out", "seed", "workers", "tolerances"},
                 "config");
  RunConfig c;
  if (j.contains("params")) c.params_block = j.at("params");
  c.grid_n = get<int>(j, "grid_n", c.grid_n);
  c.theta_truncation = get<int>(j, "theta_truncation", c.theta_truncation);
  if (j.contains("tau")) {
    const auto t = get<std::vector<double>>(j, "tau", {});
    if (t.size() != 2) throw ValidationError("tau must be [re, im]");
    c.tau = cplx(t[0], t[1]);
  }
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    reject_unknown(s, {"resolution", "im_max", "refine_tol"}, "scan");
    c.scan_resolution = get<int>(s, "resolution", c.scan_resolution);
    c.scan_im_max = get<double>(s, "im_max", c.scan_im_max);
    c.refine_tol = get<double>(s, "refine_tol", c.refine_tol);
  }
  c.omegas = get<std::vector<double>>(j, "omegas", c.omegas);
  if (j.contains("branch")) {
    const json& b = j.at("branch");
    reject_unknown(b, {"levels", "grid_n", "max_iter", "tol"}, "branch");
    c.branch_levels = get<int>(b, "levels", c.branch_levels);
    c.branch_grid_n = get<int>(b, "grid_n", c.branch_grid_n);
    c.branch_max_iter = get<int>(b, "max_iter", c.branch_max_iter);
    c.branch_tol = get<double>(b, "tol", c.branch_tol);
  }
  if (j.contains("spectrum")) {
    const json& s = j.at("spectrum");
    reject_unknown(s, {"op", "count", "b_ratio", "extrapolate"}, "spectrum");
    c.spectrum_op = get<std::string>(s, "op", c.spectrum_op);
    c.spectrum_count = get<int>(s, "count", c.spectrum_count);
    c.b_ratio = get<double>(s, "b_ratio", c.b_ratio);
    c.extrapolate = get<bool>(s, "extrapolate", c.extrapolate);
  }
  c.out_dir = get<std::string>(j, "out", c.out_dir);
  c.seed = get<std::uint64_t>(j, "seed", c.seed);
  c.workers = get<int>(j, "workers", c.workers);
  c.tolerances = get<std::map<std::string, double>>(j, "tolerances", {});

  // Validate eagerly so a bad config fails before any work starts.
  (void)c.params();
  if (c.grid_n < 8 || c.grid_n % 2) throw ValidationError("grid_n must be even and at least 8");
  if (c.theta_truncation < 0) throw ValidationError("theta_truncation must be non-negative");
  if (!(c.tau.imag() > 0.0)) throw ValidationError("tau must lie in the upper half plane");
  if (c.scan_resolution < 2) throw ValidationError("scan.resolution must be at least 2");
  if (!(c.refine_tol > 0.0)) throw ValidationError("scan.refine_tol must be positive");
  if (c.spectrum_op != "magnetic_laplacian" && c.spectrum_op != "h1")
    throw ValidationError("spectrum.op must be magnetic_laplacian or h1");
  if (c.spectrum_count < 1) throw ValidationError("spectrum.count must be positive");
  if (!(c.b_ratio > 0.0)) throw ValidationError("spectrum.b_ratio must be positive");
  if (c.workers < 0) throw ValidationError("workers must be non-negative");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  return json{{"params", c.params_block},
              {"grid_n", c.grid_n},
              {"theta_truncation", c.theta_truncation},
              {"tau", {c.tau.real(), c.tau.imag()}},
              {"scan", {{"resolution", c.scan_resolution}, {"im_max", c.scan_im_max}, {"refine_tol", c.refine_tol}}},
              {"omegas", c.omegas},
              {"branch",
               {{"levels", c.branch_levels},
                {"grid_n", c.branch_grid_n},
                {"max_iter", c.branch_max_iter},
                {"tol", c.branch_tol}}},
              {"spectrum",
               {{"op", c.spectrum_op},
                {"count", c.spectrum_count},
                {"b_ratio", c.b_ratio},
                {"extrapolate", c.extrapolate}}},
              {"out", c.out_dir},
              {"seed", c.seed},
              {"workers", c.workers},
              {"tolerances", c.tolerances}};
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string config_hash(const RunConfig& c) {
  // nlohmann objects are key-sorted, so dump() is canonical.
  return sha256_hex(to_json(c).dump());
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_json(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  // Doubles are emitted in shortest round-trip form, which never needs more than 17 digits.
  out << j.dump(2) << '\n';
}

void write_manifest(const std::filesystem::path& file, const RunConfig& c, const json& tolerances,
                    const std::string& command) {
  std::filesystem::path m = file;
  m += ".manifest.json";
  write_json(m, json{{"file", file.filename().string()},
                     {"command", command},
                     {"version", kVersion},
                     {"config_hash", config_hash(c)},
                     {"config", to_json(c)},
                     {"tolerances", tolerances}});
}

void write_csv_table(const std::filesystem::path& file, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw std::logic_error("CSV row width differs from header");
    for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt17(r[i]);
    out << '\n';
  }
}

}  // namespace ewlat
