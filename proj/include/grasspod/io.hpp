#pragma once

#include "grasspod/harness.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace grasspod {

namespace fs = std::filesystem;

// ---- snapshot files ------------------------------------------------------
//
// "GPM1", u32 version (1), u32 rows, u32 cols, then rows * cols float64, all
// little-endian, column-major.

void write_snapshot_file(const fs::path& path, const Matrix& m);
Matrix read_snapshot_file(const fs::path& path);
/// Header only: {rows, cols}.
std::pair<Index, Index> peek_snapshot_file(const fs::path& path);

/// Numeric CSV (comma separated, one matrix row per line, optional '#'
/// comment lines). Values go through strtod, so %.17g text round-trips.
Matrix read_csv_matrix(const fs::path& path);
void write_csv_matrix(const fs::path& path, const Matrix& m);

/// Writes to a sibling temporary file, then renames over `path`.
void atomic_write(const fs::path& path, const std::string& contents);

// ---- manifest ------------------------------------------------------------

struct ManifestEntry {
  Vector theta;
  std::string path;  ///< relative to the manifest directory unless absolute
  std::string split;
  std::string label;
};

struct Manifest {
  std::string problem;
  Index n = 0;
  Index n_t = 0;
  Index r = 0;  ///< 0 when unset
  bool complete = true;
  std::vector<ManifestEntry> entries;
  fs::path base_dir;  ///< not serialized

  fs::path resolve(const ManifestEntry& e) const;
  /// Indices of entries with the given split label.
  std::vector<std::size_t> indices(const std::string& split) const;
};

std::string manifest_to_json(const Manifest& m);
/// Strict parse: unknown or missing keys, duplicate parameters, bad splits
/// and (with check_files) missing or mis-shaped snapshot files are errors.
Manifest parse_manifest(const std::string& text, const fs::path& base_dir, bool check_files);
Manifest read_manifest(const fs::path& path, bool check_files = true);
void write_manifest(const fs::path& path, const Manifest& m);

/// Loads every snapshot named by the manifest.
std::vector<SnapshotMatrix> load_snapshots(const Manifest& m);

// ---- run configuration ---------------------------------------------------

struct GridOverride {
  std::vector<std::vector<double>> axes;
  std::string split;  ///< "default", "mod3", "odd_even", "interleaved"
};

struct RunConfig {
  std::string problem = "burgers";  ///< burgers, beam, wave, external
  Index rank = 0;                   ///< 0: problem default
  SurrogateConfig surrogate;
  std::uint64_t seed = 0;
  int folds = 5;
  std::string method = "both";
  std::string output_dir = "out";
  std::optional<GridOverride> grid;
  // Solver resolution overrides (0 keeps the default).
  int solver_nx = 0;
  int solver_nt = 0;

  /// Problem defaults (rank and boosting hyperparameters), then validation.
  static RunConfig defaults_for(const std::string& problem);
  void validate() const;
  Index effective_rank() const;
};

/// Strict JSON schema. Keys absent from the text keep the problem defaults.
RunConfig parse_run_config(const std::string& text);
RunConfig read_run_config(const fs::path& path);
std::string run_config_to_json(const RunConfig& cfg);

// ---- model file ----------------------------------------------------------

/// Self-contained trained surrogate: config, chart (reference and reflector
/// vectors, stored verbatim), trees, and the embedded training data the
/// interpolation baseline needs.
struct ModelFile {
  RunConfig config;
  Surrogate surrogate;
  std::string problem;
  std::string fingerprint;
  std::vector<std::string> train_labels;
  std::vector<std::string> excluded_labels;
};

std::string model_to_json(const ModelFile& m);
ModelFile parse_model(const std::string& text);
ModelFile read_model(const fs::path& path);
void write_model(const fs::path& path, const ModelFile& m);

/// FNV-1a over n, r and the parameters and snapshots of the given cases.
std::string data_fingerprint(const std::vector<CaseData>& cases,
                             const std::vector<std::size_t>& idx, Index rank);

// ---- reports -------------------------------------------------------------

/// problem,fold,label,theta_0..theta_{d-1},method,error,floor,clipped,status
std::string cases_csv(const std::string& problem, const std::vector<CaseResult>& results);

/// ErrorStats per method, per fold and pooled, with fold diagnostics and the
/// full config for provenance.
std::string stats_json(const std::string& problem, const RunConfig& cfg, const StudyResult& study,
                       const std::vector<Method>& methods, const std::vector<CaseData>& cases);

/// Table-style text summary (one row per method).
std::string stats_table(const std::vector<CaseResult>& results, const std::vector<Method>& methods);

/// Parses a cases CSV produced by cases_csv.
std::vector<CaseResult> read_cases_csv(const fs::path& path, std::string* problem = nullptr);

}  // namespace grasspod
