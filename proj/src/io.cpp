#include "grasspod/io.hpp"

#include "grasspod/error.hpp"

#include <json.hpp>

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

namespace grasspod {

using json = nlohmann::json;

namespace {

constexpr char kMagic[4] = {'G', 'P', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <typename T>
void put(std::string& buf, T v) {
  v = to_little(v);
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(const std::string& buf, std::size_t offset) {
  T v;
  std::memcpy(&v, buf.data() + offset, sizeof(T));
  return to_little(v);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json flat(const Matrix& m) {
  return json(std::vector<double>(m.data(), m.data() + m.size()));
}

Matrix unflat(const json& j, Index rows, Index cols, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Index>(v.size()) != rows * cols) {
    throw FormatError(std::string("model: '") + what + "' has the wrong length");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw FormatError(where + ": unknown key '" + item.key() + "'");
    }
  }
  for (const auto& k : required) {
    if (!obj.contains(k)) throw FormatError(where + ": missing key '" + k + "'");
  }
}

template <typename F>
auto guarded(const std::string& where, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  std::size_t b = text.find_first_not_of(" \t\r");
  std::size_t e = text.find_last_not_of(" \t\r");
  if (b == std::string::npos) throw FormatError(where + ": empty field");
  const std::string s = text.substr(b, e - b + 1);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw FormatError(where + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

}  // namespace

// ---- snapshot files ------------------------------------------------------

void atomic_write(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const std::size_t tag = std::hash<std::thread::id>{}(std::this_thread::get_id());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(tag);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw FormatError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

void write_snapshot_file(const fs::path& path, const Matrix& m) {
  if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX) throw DimensionError("matrix too large");
  std::string buf;
  buf.reserve(16 + 8 * static_cast<std::size_t>(m.size()));
  buf.append(kMagic, 4);
  put<std::uint32_t>(buf, kVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.rows()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.cols()));
  for (Index k = 0; k < m.size(); ++k) put<double>(buf, m.data()[k]);
  atomic_write(path, buf);
}

std::pair<Index, Index> peek_snapshot_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::string head(16, '\0');
  in.read(head.data(), 16);
  if (in.gcount() != 16 || std::memcmp(head.data(), kMagic, 4) != 0) {
    throw FormatError("'" + path.string() + "' is not a snapshot file");
  }
  if (get<std::uint32_t>(head, 4) != kVersion) {
    throw FormatError("'" + path.string() + "' has an unsupported format version");
  }
  return {get<std::uint32_t>(head, 8), get<std::uint32_t>(head, 12)};
}

Matrix read_snapshot_file(const fs::path& path) {
  const std::string buf = read_file(path);
  if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw FormatError("'" + path.string() + "' is not a snapshot file");
  }
  if (get<std::uint32_t>(buf, 4) != kVersion) {
    throw FormatError("'" + path.string() + "' has an unsupported format version");
  }
  const Index rows = get<std::uint32_t>(buf, 8);
  const Index cols = get<std::uint32_t>(buf, 12);
  const std::size_t expected = 16 + 8 * static_cast<std::size_t>(rows * cols);
  if (buf.size() != expected) {
    throw FormatError("'" + path.string() + "': header says " + std::to_string(rows) + " x " +
                      std::to_string(cols) + " but the payload has " +
                      std::to_string(buf.size()) + " bytes");
  }
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = get<double>(buf, 16 + 8 * static_cast<std::size_t>(k));
  if (!m.allFinite()) throw NonFiniteError("'" + path.string() + "' contains non-finite values");
  return m;
}

Matrix read_csv_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    for (const auto& field : split_line(line)) {
      row.push_back(parse_double(field, path.string() + ":" + std::to_string(lineno)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("'" + path.string() + "' holds no data");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  if (!m.allFinite()) throw NonFiniteError("'" + path.string() + "' contains non-finite values");
  return m;
}

void write_csv_matrix(const fs::path& path, const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += num(m(i, j));
    }
    out += '\n';
  }
  atomic_write(path, out);
}

// ---- manifest ------------------------------------------------------------

fs::path Manifest::resolve(const ManifestEntry& e) const {
  const fs::path p(e.path);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::size_t> Manifest::indices(const std::string& split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].split == split) out.push_back(i);
  }
  return out;
}

std::string manifest_to_json(const Manifest& m) {
  json j;
  j["problem"] = m.problem;
  j["n"] = m.n;
  j["n_T"] = m.n_t;
  j["r"] = m.r;
  j["complete"] = m.complete;
  j["entries"] = json::array();
  for (const auto& e : m.entries) {
    json je;
    je["theta"] = vec_json(e.theta);
    je["path"] = e.path;
    je["split"] = e.split;
    je["label"] = e.label;
    j["entries"].push_back(je);
  }
  return j.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& text, const fs::path& base_dir, bool check_files) {
  return guarded("manifest", [&] {
    const json j = json::parse(text);
    require_keys(j, {"problem", "n", "n_T", "r", "complete", "entries"},
                 {"problem", "n", "n_T", "r", "complete", "entries"}, "manifest");
    Manifest m;
    m.base_dir = base_dir;
    m.problem = j.at("problem").get<std::string>();
    m.n = j.at("n").get<Index>();
    m.n_t = j.at("n_T").get<Index>();
    m.r = j.at("r").get<Index>();
    m.complete = j.at("complete").get<bool>();
    if (m.n < 1 || m.n_t < 1 || m.r < 0) throw FormatError("manifest: bad n, n_T or r");
    if (!j.at("entries").is_array()) throw FormatError("manifest: 'entries' must be an array");
    for (const auto& je : j.at("entries")) {
      require_keys(je, {"theta", "path", "split", "label"}, {"theta", "path", "split"},
                   "manifest entry");
      ManifestEntry e;
      e.theta = json_vec(je.at("theta"));
      e.path = je.at("path").get<std::string>();
      e.split = je.at("split").get<std::string>();
      e.label = je.contains("label") ? je.at("label").get<std::string>() : e.path;
      if (e.theta.size() == 0 || !e.theta.allFinite()) {
        throw FormatError("manifest: entry '" + e.label + "' has an invalid theta");
      }
      if (e.split != "train" && e.split != "test") {
        throw FormatError("manifest: entry '" + e.label + "' has split '" + e.split +
                          "' (expected train or test)");
      }
      m.entries.push_back(std::move(e));
    }
    for (std::size_t a = 0; a < m.entries.size(); ++a) {
      if (m.entries[a].theta.size() != m.entries[0].theta.size()) {
        throw FormatError("manifest: parameter dimensions differ between entries");
      }
      for (std::size_t b = a + 1; b < m.entries.size(); ++b) {
        if (m.entries[a].theta == m.entries[b].theta) {
          throw FormatError("manifest: duplicate parameter for '" + m.entries[a].label +
                            "' and '" + m.entries[b].label + "'");
        }
      }
    }
    if (check_files) {
      for (const auto& e : m.entries) {
        const fs::path p = m.resolve(e);
        if (!fs::exists(p)) throw FormatError("manifest: missing file '" + p.string() + "'");
        const auto [rows, cols] = peek_snapshot_file(p);
        if (rows != m.n || cols != m.n_t) {
          throw FormatError("manifest: '" + p.string() + "' is " + std::to_string(rows) + " x " +
                            std::to_string(cols) + ", expected " + std::to_string(m.n) + " x " +
                            std::to_string(m.n_t));
        }
      }
    }
    return m;
  });
}

Manifest read_manifest(const fs::path& path, bool check_files) {
  return parse_manifest(read_file(path), path.parent_path(), check_files);
}

void write_manifest(const fs::path& path, const Manifest& m) { atomic_write(path, manifest_to_json(m)); }

std::vector<SnapshotMatrix> load_snapshots(const Manifest& m) {
  std::vector<SnapshotMatrix> out;
  out.reserve(m.entries.size());
  for (const auto& e : m.entries) {
    SnapshotMatrix s;
    s.data = read_snapshot_file(m.resolve(e));
    s.parameter = e.theta;
    s.label = e.label;
    out.push_back(std::move(s));
  }
  return out;
}

// ---- run configuration ---------------------------------------------------

RunConfig RunConfig::defaults_for(const std::string& problem) {
  RunConfig c;
  c.problem = problem;
  TrainConfig& t = c.surrogate.train;
  t.leaf_penalty = 1e-3;
  t.l2_penalty = 1e-2;
  if (problem == "burgers") {
    c.rank = 6;
    t.rounds = 100;
    t.learning_rate = 0.35;
    t.max_depth = 3;
    t.subsample = 1.0;
  } else if (problem == "beam") {
    c.rank = 10;
    t.rounds = 80;
    t.learning_rate = 0.4;
    t.max_depth = 4;
    t.subsample = 1.0;
  } else if (problem == "wave") {
    c.rank = 20;
    t.rounds = 80;
    t.learning_rate = 0.2;
    t.max_depth = 4;
    t.subsample = 1.0;
  } else if (problem == "external") {
    c.rank = 0;
    t.rounds = 120;
    t.learning_rate = 0.2;
    t.max_depth = 2;
    t.subsample = 0.7;
  } else {
    throw InvalidArgument("unknown problem '" + problem + "'");
  }
  return c;
}

Index RunConfig::effective_rank() const { return rank; }

void RunConfig::validate() const {
  if (problem != "burgers" && problem != "beam" && problem != "wave" && problem != "external") {
    throw InvalidArgument("unknown problem '" + problem + "'");
  }
  if (rank < 1) throw InvalidArgument("rank must be set to a positive value");
  if (folds < 2) throw InvalidArgument("folds must be >= 2");
  if (method != "both" && method != "cxgb" && method != "interp" && method != "oracle") {
    throw InvalidArgument("method must be one of cxgb, interp, oracle, both");
  }
  surrogate.train.validate();
  if (grid) {
    if (grid->axes.size() != 2) throw InvalidArgument("grid.axes must hold two axes");
    for (const auto& ax : grid->axes) {
      if (ax.empty()) throw InvalidArgument("grid axes must be nonempty");
    }
    const std::string& s = grid->split;
    if (s != "default" && s != "mod3" && s != "odd_even" && s != "interleaved") {
      throw InvalidArgument("grid.split must be default, mod3, odd_even or interleaved");
    }
  }
  if (solver_nx < 0 || solver_nt < 0) throw InvalidArgument("solver overrides must be >= 0");
}

RunConfig parse_run_config(const std::string& text) {
  return guarded("config", [&] {
    const json j = json::parse(text);
    require_keys(j,
                 {"problem", "rank", "seed", "folds", "method", "output_dir", "train", "reference",
                  "interp_scheme", "drop_out_of_chart", "grid", "solver"},
                 {}, "config");
    RunConfig c = RunConfig::defaults_for(j.value("problem", std::string("burgers")));
    if (j.contains("rank")) c.rank = j.at("rank").get<Index>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("folds")) c.folds = j.at("folds").get<int>();
    if (j.contains("method")) c.method = j.at("method").get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("train")) {
      const json& t = j.at("train");
      require_keys(t,
                   {"rounds", "learning_rate", "max_depth", "leaf_penalty", "l2_penalty",
                    "subsample", "min_samples_leaf", "constrained"},
                   {}, "config.train");
      TrainConfig& tc = c.surrogate.train;
      if (t.contains("rounds")) tc.rounds = t.at("rounds").get<int>();
      if (t.contains("learning_rate")) tc.learning_rate = t.at("learning_rate").get<double>();
      if (t.contains("max_depth")) tc.max_depth = t.at("max_depth").get<int>();
      if (t.contains("leaf_penalty")) tc.leaf_penalty = t.at("leaf_penalty").get<double>();
      if (t.contains("l2_penalty")) tc.l2_penalty = t.at("l2_penalty").get<double>();
      if (t.contains("subsample")) tc.subsample = t.at("subsample").get<double>();
      if (t.contains("min_samples_leaf")) tc.min_samples_leaf = t.at("min_samples_leaf").get<int>();
      if (t.contains("constrained")) tc.constrained = t.at("constrained").get<bool>();
    }
    if (j.contains("reference")) {
      const json& r = j.at("reference");
      require_keys(r, {"policy", "index"}, {}, "config.reference");
      if (r.contains("policy")) {
        c.surrogate.policy = parse_reference_policy(r.at("policy").get<std::string>());
      }
      if (r.contains("index")) c.surrogate.reference_index = r.at("index").get<std::size_t>();
    }
    if (j.contains("interp_scheme")) {
      c.surrogate.scheme = parse_interp_scheme(j.at("interp_scheme").get<std::string>());
    }
    if (j.contains("drop_out_of_chart")) {
      c.surrogate.drop_out_of_chart = j.at("drop_out_of_chart").get<bool>();
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      require_keys(g, {"axes", "split"}, {"axes"}, "config.grid");
      GridOverride go;
      go.axes = g.at("axes").get<std::vector<std::vector<double>>>();
      go.split = g.value("split", std::string("default"));
      c.grid = std::move(go);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      require_keys(s, {"nx", "nt"}, {}, "config.solver");
      c.solver_nx = s.value("nx", 0);
      c.solver_nt = s.value("nt", 0);
    }
    c.surrogate.train.rng_seed = c.seed;
    if (c.problem != "external" || c.rank > 0) c.validate();
    return c;
  });
}

RunConfig read_run_config(const fs::path& path) { return parse_run_config(read_file(path)); }

namespace {

json config_json(const RunConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["rank"] = c.rank;
  j["seed"] = c.seed;
  j["folds"] = c.folds;
  j["method"] = c.method;
  j["output_dir"] = c.output_dir;
  const TrainConfig& t = c.surrogate.train;
  j["train"] = {{"rounds", t.rounds},
                {"learning_rate", t.learning_rate},
                {"max_depth", t.max_depth},
                {"leaf_penalty", t.leaf_penalty},
                {"l2_penalty", t.l2_penalty},
                {"subsample", t.subsample},
                {"min_samples_leaf", t.min_samples_leaf},
                {"constrained", t.constrained}};
  j["reference"] = {{"policy", to_string(c.surrogate.policy)},
                    {"index", c.surrogate.reference_index}};
  j["interp_scheme"] = to_string(c.surrogate.scheme);
  j["drop_out_of_chart"] = c.surrogate.drop_out_of_chart;
  if (c.grid) j["grid"] = {{"axes", c.grid->axes}, {"split", c.grid->split}};
  if (c.solver_nx || c.solver_nt) j["solver"] = {{"nx", c.solver_nx}, {"nt", c.solver_nt}};
  return j;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

// ---- model file ----------------------------------------------------------

std::string data_fingerprint(const std::vector<CaseData>& cases,
                             const std::vector<std::size_t>& idx, Index rank) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  const std::int64_t r = rank;
  mix(&r, sizeof r);
  for (std::size_t i : idx) {
    const CaseData& c = cases.at(i);
    const std::int64_t n = c.snapshots.rows();
    mix(&n, sizeof n);
    mix(c.theta.data(), sizeof(double) * static_cast<std::size_t>(c.theta.size()));
    mix(c.snapshots.data(), sizeof(double) * static_cast<std::size_t>(c.snapshots.size()));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string model_to_json(const ModelFile& m) {
  const Surrogate& s = m.surrogate;
  const Ensemble& e = s.model;
  json j;
  j["format"] = "grasspod-model";
  j["version"] = 1;
  j["problem"] = m.problem;
  j["fingerprint"] = m.fingerprint;
  j["config"] = config_json(m.config);
  j["n"] = s.chart.n();
  j["r"] = s.chart.r();
  j["chart"] = {{"reference", flat(s.chart.reference().matrix())},
                {"reflectors", flat(s.chart.reflectors())}};
  j["reference_index"] = s.reference.index;
  j["max_distance"] = s.reference.max_distance;
  j["train_labels"] = m.train_labels;
  j["excluded_labels"] = m.excluded_labels;
  j["theta"] = flat(s.theta);
  j["train_count"] = s.theta.rows();
  j["input_dim"] = s.theta.cols();

  j["y"] = flat(s.y);
  j["basis"] = flat(e.basis);
  j["basis_cols"] = e.basis.cols();

  json trees = json::array();
  for (const Tree& t : e.trees) {
    json jt;
    std::vector<int> feature, left, right;
    std::vector<double> threshold;
    json weights = json::array();
    for (const TreeNode& nd : t.nodes) {
      feature.push_back(nd.feature);
      threshold.push_back(nd.threshold);
      left.push_back(nd.left);
      right.push_back(nd.right);
      weights.push_back(nd.is_leaf() ? vec_json(nd.weight) : json(nullptr));
    }
    jt["feature"] = feature;
    jt["threshold"] = threshold;
    jt["left"] = left;
    jt["right"] = right;
    jt["weight"] = weights;
    trees.push_back(jt);
  }
  j["ensemble"] = {{"learning_rate", e.learning_rate},
                   {"output_dim", e.output_dim},
                   {"input_dim", e.input_dim},
                   {"trees", trees}};
  j["fit"] = {{"solver_failures", s.trace.solver_failures},
              {"final_train_loss", s.trace.train_loss.empty() ? 0.0 : s.trace.train_loss.back()}};
  j["has_interp"] = s.interp.has_value();
  return j.dump() + "\n";
}

ModelFile parse_model(const std::string& text) {
  return guarded("model", [&] {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != "grasspod-model" || j.value("version", 0) != 1) {
      throw FormatError("model: not a grasspod model file (or unsupported version)");
    }
    ModelFile m;
    m.problem = j.at("problem").get<std::string>();
    m.fingerprint = j.at("fingerprint").get<std::string>();
    m.config = parse_run_config(j.at("config").dump());
    m.train_labels = j.at("train_labels").get<std::vector<std::string>>();
    m.excluded_labels = j.at("excluded_labels").get<std::vector<std::string>>();

    const Index n = j.at("n").get<Index>();
    const Index r = j.at("r").get<Index>();
    Surrogate& s = m.surrogate;
    PodBasis ref(unflat(j.at("chart").at("reference"), n, r, "reference"));
    s.chart = Chart::from_parts(std::move(ref), unflat(j.at("chart").at("reflectors"), n, r, "reflectors"));
    s.reference.index = j.at("reference_index").get<std::size_t>();
    s.reference.max_distance = j.at("max_distance").get<double>();

    const Index count = j.at("train_count").get<Index>();
    const Index d = j.at("input_dim").get<Index>();
    s.theta = unflat(j.at("theta"), count, d, "theta");
    const Index bcols = j.at("basis_cols").get<Index>();

    Ensemble& e = s.model;
    const json& je = j.at("ensemble");
    e.learning_rate = je.at("learning_rate").get<double>();
    e.output_dim = je.at("output_dim").get<Index>();
    e.input_dim = je.at("input_dim").get<Index>();
    if (bcols > 0) e.basis = unflat(j.at("basis"), s.chart.dim(), bcols, "basis");
    s.y = unflat(j.at("y"), s.chart.dim(), count, "y");

    for (const json& jt : je.at("trees")) {
      Tree t;
      const auto feature = jt.at("feature").get<std::vector<int>>();
      const auto threshold = jt.at("threshold").get<std::vector<double>>();
      const auto left = jt.at("left").get<std::vector<int>>();
      const auto right = jt.at("right").get<std::vector<int>>();
      const json& weights = jt.at("weight");
      const std::size_t nodes = feature.size();
      if (threshold.size() != nodes || left.size() != nodes || right.size() != nodes ||
          weights.size() != nodes || nodes == 0) {
        throw FormatError("model: malformed tree");
      }
      for (std::size_t k = 0; k < nodes; ++k) {
        TreeNode nd;
        nd.feature = feature[k];
        nd.threshold = threshold[k];
        nd.left = left[k];
        nd.right = right[k];
        if (nd.is_leaf()) {
          nd.weight = json_vec(weights[k]);
          if (nd.weight.size() != (bcols > 0 ? bcols : e.output_dim)) {
            throw FormatError("model: leaf weight has the wrong length");
          }
        } else {
          const auto limit = static_cast<int>(nodes);
          if (nd.feature >= e.input_dim || nd.left <= static_cast<int>(k) || nd.right <= static_cast<int>(k) ||
              nd.left >= limit || nd.right >= limit) {
            throw FormatError("model: malformed tree links");
          }
        }
        t.nodes.push_back(std::move(nd));
      }
      e.trees.push_back(std::move(t));
    }
    s.trace.solver_failures = j.at("fit").at("solver_failures").get<int>();
    s.trace.train_loss = {j.at("fit").at("final_train_loss").get<double>()};
    if (j.at("has_interp").get<bool>()) {
      InterpScheme scheme = m.config.surrogate.scheme;
      if (scheme == InterpScheme::automatic && s.theta.cols() == 1 && s.theta.rows() < 2) {
        scheme = InterpScheme::idw;
      }
      s.interp.emplace(s.theta, s.y, scheme, s.chart.radius());
    }
    return m;
  });
}

ModelFile read_model(const fs::path& path) { return parse_model(read_file(path)); }

void write_model(const fs::path& path, const ModelFile& m) { atomic_write(path, model_to_json(m)); }

// ---- reports -------------------------------------------------------------

std::string cases_csv(const std::string& problem, const std::vector<CaseResult>& results) {
  const Index d = results.empty() ? 0 : results.front().theta.size();
  std::string out = "problem,fold,label";
  for (Index k = 0; k < d; ++k) out += ",theta_" + std::to_string(k);
  out += ",method,error,floor,clipped,status\n";
  for (const CaseResult& r : results) {
    out += problem + ',' + std::to_string(r.fold) + ',' + sanitize(r.label);
    for (Index k = 0; k < d; ++k) out += ',' + num(r.theta(k));
    out += ',' + to_string(r.method) + ',' + (r.failed ? std::string("nan") : num(r.error)) + ',' +
           num(r.floor) + ',' + (r.clipped ? "1" : "0") + ',' +
           (r.failed ? "failed: " + sanitize(r.message) : std::string("ok")) + '\n';
  }
  return out;
}

namespace {

json stats_to_json(const ErrorStats& s) {
  if (s.count == 0) return json{{"count", 0}};
  return {{"count", s.count}, {"mean", s.mean}, {"std", s.std},   {"median", s.median},
          {"q25", s.q25},     {"q75", s.q75},   {"min", s.min},   {"max", s.max}};
}

}  // namespace

std::string stats_json(const std::string& problem, const RunConfig& cfg, const StudyResult& study,
                       const std::vector<Method>& methods, const std::vector<CaseData>& cases) {
  json j;
  j["problem"] = problem;
  j["seed"] = cfg.seed;
  j["config"] = config_json(cfg);
  json jm = json::object();
  for (Method m : methods) {
    json entry;
    entry["pooled"] = stats_to_json(summarize(study.cases, m));
    json per_fold = json::array();
    int clipped = 0, failed = 0;
    for (const FoldSummary& f : study.folds) {
      std::vector<CaseResult> sub;
      for (const CaseResult& r : study.cases) {
        if (r.fold == f.fold) sub.push_back(r);
      }
      per_fold.push_back(stats_to_json(summarize(sub, m)));
    }
    for (const CaseResult& r : study.cases) {
      if (r.method != m) continue;
      clipped += r.clipped;
      failed += r.failed;
    }
    entry["folds"] = per_fold;
    entry["clipped"] = clipped;
    entry["failed"] = failed;
    jm[to_string(m)] = entry;
  }
  j["methods"] = jm;
  json jf = json::array();
  for (const FoldSummary& f : study.folds) {
    std::vector<std::string> excluded;
    for (std::size_t i : f.excluded) excluded.push_back(cases.at(i).label);
    jf.push_back({{"fold", f.fold},
                  {"train_count", f.train_count},
                  {"test_count", f.test_count},
                  {"reference", f.train_count ? cases.at(f.reference).label : std::string()},
                  {"max_distance", f.max_distance},
                  {"solver_failures", f.solver_failures},
                  {"excluded", excluded}});
  }
  j["folds"] = jf;
  return j.dump(2) + "\n";
}

std::string stats_table(const std::vector<CaseResult>& results, const std::vector<Method>& methods) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-8s %5s %11s %11s %11s %11s %11s %11s %11s\n", "method", "n",
                "mean", "std", "median", "q25", "q75", "min", "max");
  out += buf;
  for (Method m : methods) {
    const ErrorStats s = summarize(results, m);
    std::snprintf(buf, sizeof buf, "%-8s %5zu %11.3e %11.3e %11.3e %11.3e %11.3e %11.3e %11.3e\n",
                  to_string(m).c_str(), s.count, s.mean, s.std, s.median, s.q25, s.q75, s.min,
                  s.max);
    out += buf;
  }
  return out;
}

std::vector<CaseResult> read_cases_csv(const fs::path& path, std::string* problem) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("'" + path.string() + "' is empty");
  const auto header = split_line(line);
  const std::size_t width = header.size();
  if (width < 8 || header[0] != "problem" || header[1] != "fold" || header[2] != "label" ||
      header[width - 5] != "method" || header.back() != "status") {
    throw FormatError("'" + path.string() + "' is not a cases report");
  }
  const std::size_t d = width - 8;
  std::vector<CaseResult> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_line(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (f.size() != width) throw FormatError(where + ": wrong field count");
    if (problem) *problem = f[0];
    CaseResult r;
    r.fold = static_cast<int>(parse_double(f[1], where));
    r.label = f[2];
    r.theta.resize(static_cast<Index>(d));
    for (std::size_t k = 0; k < d; ++k) r.theta(static_cast<Index>(k)) = parse_double(f[3 + k], where);
    r.method = parse_method(f[3 + d]);
    r.failed = f[width - 1] != "ok";
    r.error = r.failed ? std::nan("") : parse_double(f[4 + d], where);
    r.floor = parse_double(f[5 + d], where);
    r.clipped = f[6 + d] == "1";
    if (r.failed) r.message = f[width - 1];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace grasspod
