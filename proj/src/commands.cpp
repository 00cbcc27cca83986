#include "grasspod/commands.hpp"

#include "grasspod/error.hpp"
#include "grasspod/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace grasspod {

namespace {

std::string fmt_label(const std::string& problem, const Vector& theta) {
  std::string s = problem;
  char buf[40];
  for (Index k = 0; k < theta.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s%g", k ? "_" : "_p", theta(k));
    s += buf;
  }
  return s;
}

fs::path out_dir(const RunConfig& cfg) { return fs::path(cfg.output_dir); }

Manifest subset(const Manifest& m, const std::vector<std::size_t>& idx) {
  Manifest s = m;
  s.entries.clear();
  for (std::size_t i : idx) s.entries.push_back(m.entries.at(i));
  return s;
}

/// Config for a manifest-driven command. The manifest's problem picks the
/// defaults and its rank fills in when nothing else sets one.
RunConfig config_for_manifest(const CommandOptions& opt, const Manifest& m) {
  RunConfig cfg = resolve_config(opt, m.problem);
  if (!opt.rank && !opt.config && m.r > 0) cfg.rank = m.r;
  if (cfg.problem != m.problem) {
    throw InvalidArgument("config problem '" + cfg.problem + "' does not match manifest problem '" +
                          m.problem + "'");
  }
  cfg.validate();
  return cfg;
}

Manifest require_manifest(const CommandOptions& opt) {
  if (opt.manifest.empty()) throw InvalidArgument("--manifest is required");
  return read_manifest(opt.manifest);
}

bool any_failed(const std::vector<CaseResult>& results) {
  return std::any_of(results.begin(), results.end(), [](const CaseResult& r) { return r.failed; });
}

void write_reports(const RunConfig& cfg, const StudyResult& study, const std::vector<Method>& methods,
                   const std::vector<CaseData>& cases, std::ostream& log) {
  const fs::path dir = out_dir(cfg);
  atomic_write(dir / "cases.csv", cases_csv(cfg.problem, study.cases));
  atomic_write(dir / "stats.json", stats_json(cfg.problem, cfg, study, methods, cases));
  const std::string table = stats_table(study.cases, methods);
  atomic_write(dir / "summary.txt", table);
  log << table;
  for (const CaseResult& r : study.cases) {
    if (r.failed) log << "case " << r.label << " (" << to_string(r.method) << ") failed: " << r.message << "\n";
  }
  log << "reports written to " << dir.string() << "\n";
}

std::vector<std::string> split_csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opt, const std::string& fallback_problem) {
  RunConfig cfg;
  if (opt.config) {
    cfg = read_run_config(*opt.config);
    if (opt.problem && *opt.problem != cfg.problem) {
      throw InvalidArgument("--problem " + *opt.problem + " conflicts with the config's '" +
                            cfg.problem + "'");
    }
  } else {
    cfg = RunConfig::defaults_for(opt.problem ? *opt.problem : fallback_problem);
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.rank) cfg.rank = *opt.rank;
  if (opt.method) {
    methods_for(*opt.method);
    cfg.method = *opt.method;
  }
  if (opt.out) cfg.output_dir = *opt.out;
  if (opt.folds) cfg.folds = *opt.folds;
  cfg.surrogate.train.rng_seed = cfg.seed;
  return cfg;
}

std::vector<Method> methods_for(const std::string& name) {
  if (name == "both") return {Method::cxgb, Method::interp};
  return {parse_method(name)};
}

std::vector<GridPoint> problem_grid(const RunConfig& cfg) {
  if (!cfg.grid) {
    if (cfg.problem == "burgers") return burgers_grid();
    if (cfg.problem == "beam") return beam_grid();
    if (cfg.problem == "wave") return wave_grid();
    throw InvalidArgument("problem '" + cfg.problem + "' has no built-in grid");
  }
  const GridOverride& g = *cfg.grid;
  if (g.axes.size() != 2) throw InvalidArgument("grid override needs two axes");
  std::string rule = g.split;
  if (rule == "default") {
    rule = cfg.problem == "beam" ? "odd_even" : cfg.problem == "wave" ? "interleaved" : "mod3";
  }
  std::vector<GridPoint> pts;
  for (std::size_t i = 0; i < g.axes[0].size(); ++i) {
    for (std::size_t j = 0; j < g.axes[1].size(); ++j) {
      const Vector theta{{g.axes[0][i], g.axes[1][j]}};
      std::string split;
      if (rule == "mod3") {
        split = pts.size() % 3 == 0 ? "train" : "test";
      } else if (rule == "interleaved") {
        split = (i + j) % 3 == 0 ? "train" : "test";
      } else {
        const auto parity = [](double v) {
          const double r = std::round(v);
          return r == v ? static_cast<int>(std::fabs(std::fmod(r, 2.0))) : -1;
        };
        const int a = parity(theta(0)), b = parity(theta(1));
        if (a == 1 && b == 1) split = "train";
        else if (a == 0 && b == 0) split = "test";
        else continue;
      }
      pts.push_back({theta, split, fmt_label(cfg.problem, theta)});
    }
  }
  if (pts.empty()) throw InvalidArgument("grid override produced no points");
  return pts;
}

SnapshotMatrix simulate(const RunConfig& cfg, const Vector& theta) {
  if (theta.size() != 2) throw DimensionError("simulate: expected two parameters");
  if (cfg.problem == "burgers") {
    BurgersSpec s;
    s.a = theta(0);
    s.nu = theta(1);
    if (cfg.solver_nx) s.nx = cfg.solver_nx;
    if (cfg.solver_nt) s.nt = cfg.solver_nt;
    return run_burgers(s);
  }
  if (cfg.problem == "beam") {
    BeamSpec s;
    s.mu1 = theta(0);
    s.mu2 = theta(1);
    if (cfg.solver_nx) s.nx = cfg.solver_nx;
    if (cfg.solver_nt) s.nt = cfg.solver_nt;
    return run_beam(s);
  }
  if (cfg.problem == "wave") {
    WaveSpec s;
    s.mu1 = theta(0);
    s.mu2 = theta(1);
    if (cfg.solver_nx) s.grid = cfg.solver_nx;
    if (cfg.solver_nt) s.nt = cfg.solver_nt;
    return run_wave(s);
  }
  throw InvalidArgument("problem '" + cfg.problem + "' has no solver");
}

std::vector<CaseData> load_cases(const Manifest& m, Index rank) {
  std::vector<std::string> splits;
  for (const auto& e : m.entries) splits.push_back(e.split);
  return prepare_cases(load_snapshots(m), rank, splits);
}

// ---- generate -------------------------------------------------------------

int cmd_generate(const CommandOptions& opt, std::ostream& log) {
  const RunConfig cfg = resolve_config(opt);
  const std::vector<GridPoint> pts = problem_grid(cfg);
  const fs::path dir = out_dir(cfg);
  fs::create_directories(dir);

  std::vector<std::string> errors(pts.size());
  std::vector<std::pair<Index, Index>> shapes(pts.size(), {0, 0});
  std::vector<std::string> labels(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    try {
      SnapshotMatrix sm = simulate(cfg, pts[i].theta);
      labels[i] = sm.label;
      write_snapshot_file(dir / (sm.label + ".gpm"), sm.data);
      shapes[i] = {sm.data.rows(), sm.data.cols()};
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  Manifest m;
  m.problem = cfg.problem;
  m.r = cfg.rank;
  m.complete = true;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!errors[i].empty()) {
      ++failures;
      m.complete = false;
      log << "grid point " << pts[i].label << " failed: " << errors[i] << "\n";
      continue;
    }
    if (m.n == 0) {
      m.n = shapes[i].first;
      m.n_t = shapes[i].second;
    }
    m.entries.push_back({pts[i].theta, labels[i] + ".gpm", pts[i].split, labels[i]});
  }
  if (m.entries.empty()) {
    log << "every grid point failed; no manifest written\n";
    return kExitFatal;
  }
  write_manifest(dir / "manifest.json", m);
  log << "generated " << m.entries.size() << " of " << pts.size() << " " << cfg.problem
      << " runs (" << m.n << " x " << m.n_t << ") in " << dir.string() << "\n";
  return failures ? kExitCaseFailures : kExitOk;
}

// ---- import ---------------------------------------------------------------

int cmd_import(const CommandOptions& opt, std::ostream& log) {
  if (opt.inputs.empty()) throw InvalidArgument("import: no input files");
  const RunConfig cfg = resolve_config(opt, "external");
  const fs::path dir = out_dir(cfg);

  if (!opt.list) {
    if (!opt.output.empty() && opt.inputs.size() != 1) {
      throw InvalidArgument("import: --output takes exactly one input");
    }
    for (const auto& in : opt.inputs) {
      const Matrix m = read_csv_matrix(in);
      const fs::path target =
          opt.output.empty() ? dir / (fs::path(in).stem().string() + ".gpm") : fs::path(opt.output);
      write_snapshot_file(target, m);
      const Matrix back = read_snapshot_file(target);
      if (back.rows() != m.rows() || back.cols() != m.cols() ||
          std::memcmp(back.data(), m.data(), sizeof(double) * static_cast<std::size_t>(m.size())) != 0) {
        throw FormatError("import: round-trip mismatch for '" + in + "'");
      }
      log << in << " -> " << target.string() << " (" << m.rows() << " x " << m.cols() << ")\n";
    }
    return kExitOk;
  }

  // List mode: each row is "path,theta_0,...,theta_{d-1}".
  if (opt.inputs.size() != 1) throw InvalidArgument("import --list takes one list file");
  const fs::path list(opt.inputs[0]);
  std::ifstream in(list);
  if (!in) throw FormatError("cannot open '" + list.string() + "'");
  struct Row {
    fs::path path;
    Vector theta;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_csv_fields(line);
    if (f.size() < 2) throw FormatError("import list: '" + line + "' has no parameters");
    Row r;
    r.path = fs::path(f[0]).is_absolute() ? fs::path(f[0]) : list.parent_path() / f[0];
    r.theta.resize(static_cast<Index>(f.size() - 1));
    for (std::size_t k = 1; k < f.size(); ++k) {
      char* end = nullptr;
      r.theta(static_cast<Index>(k - 1)) = std::strtod(f[k].c_str(), &end);
      if (end == f[k].c_str() || *end != '\0') {
        throw FormatError("import list: bad parameter '" + f[k] + "'");
      }
    }
    if (!rows.empty() && r.theta.size() != rows[0].theta.size()) {
      throw FormatError("import list: parameter dimensions differ");
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw FormatError("import list: no entries");
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::lexicographical_compare(a.theta.begin(), a.theta.end(), b.theta.begin(), b.theta.end());
  });

  Manifest m;
  m.problem = cfg.problem;
  m.r = cfg.rank;
  std::map<std::string, int> seen;
  const SplitIndices split = split_mod3(rows.size());
  std::vector<std::string> splits(rows.size(), "test");
  for (std::size_t i : split.train) splits[i] = "train";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Matrix data = read_csv_matrix(rows[i].path);
    if (m.n == 0) {
      m.n = data.rows();
      m.n_t = data.cols();
    } else if (data.rows() != m.n || data.cols() != m.n_t) {
      throw DimensionError("import list: '" + rows[i].path.string() + "' is " +
                           std::to_string(data.rows()) + " x " + std::to_string(data.cols()) +
                           ", expected " + std::to_string(m.n) + " x " + std::to_string(m.n_t));
    }
    std::string label = rows[i].path.stem().string();
    if (seen[label]++) label += "_" + std::to_string(i);
    write_snapshot_file(dir / (label + ".gpm"), data);
    m.entries.push_back({rows[i].theta, label + ".gpm", splits[i], label});
  }
  write_manifest(dir / "manifest.json", m);
  log << "imported " << m.entries.size() << " matrices (" << split.train.size() << " train / "
      << split.test.size() << " test) into " << dir.string() << "\n";
  return kExitOk;
}

// ---- pod ------------------------------------------------------------------

int cmd_pod(const CommandOptions& opt, std::ostream& log) {
  const Manifest m = require_manifest(opt);
  const RunConfig cfg = config_for_manifest(opt, m);
  const std::vector<CaseData> cases = load_cases(m, cfg.rank);
  const fs::path dir = out_dir(cfg) / "pod";
  std::string table = "label,rank,floor,energy_captured\n";
  char buf[128];
  for (const CaseData& c : cases) {
    write_snapshot_file(dir / (c.label + ".gpm"), c.pod.basis.matrix());
    std::snprintf(buf, sizeof buf, ",%lld,%.17g,%.17g\n", static_cast<long long>(cfg.rank),
                  c.pod.truncation_floor(), c.pod.energy_captured);
    table += c.label + buf;
  }
  atomic_write(out_dir(cfg) / "pod.csv", table);
  log << "wrote " << cases.size() << " rank-" << cfg.rank << " bases to " << dir.string() << "\n";
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

int cmd_train(const CommandOptions& opt, std::ostream& log) {
  const Manifest m = require_manifest(opt);
  const RunConfig cfg = config_for_manifest(opt, m);
  const auto train_idx = m.indices("train");
  if (train_idx.empty()) throw InvalidArgument("train: the manifest has no training entries");
  const std::vector<CaseData> cases = load_cases(subset(m, train_idx), cfg.rank);
  std::vector<std::size_t> all(cases.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  ModelFile mf;
  mf.config = cfg;
  mf.problem = m.problem;
  mf.surrogate = train_surrogate(cases, all, cfg.surrogate);
  mf.fingerprint = data_fingerprint(cases, all, cfg.rank);
  for (const CaseData& c : cases) mf.train_labels.push_back(c.label);
  for (std::size_t i : mf.surrogate.reference.excluded) mf.excluded_labels.push_back(cases[i].label);

  const fs::path path = out_dir(cfg) / "model.json";
  write_model(path, mf);
  const Surrogate& s = mf.surrogate;
  log << "reference " << cases[s.reference.index].label << " (max distance "
      << s.reference.max_distance << " rad)\n";
  if (!mf.excluded_labels.empty()) {
    log << "left out of the chart:";
    for (const auto& l : mf.excluded_labels) log << " " << l;
    log << "\n";
  }
  if (!s.trace.train_loss.empty()) {
    log << "training loss " << s.trace.train_loss.front() << " -> " << s.trace.train_loss.back()
        << ", solver failures " << s.trace.solver_failures << "\n";
  }
  log << "model written to " << path.string() << "\n";
  return kExitOk;
}

// ---- predict --------------------------------------------------------------

int cmd_predict(const CommandOptions& opt, std::ostream& log) {
  if (opt.model.empty()) throw InvalidArgument("--model is required");
  const ModelFile mf = read_model(opt.model);
  const std::string method_name = opt.method ? *opt.method : "cxgb";
  const Method method = method_name == "both" ? Method::cxgb : parse_method(method_name);
  if (static_cast<Index>(opt.theta.size()) != mf.surrogate.theta.cols()) {
    throw DimensionError("predict: expected " + std::to_string(mf.surrogate.theta.cols()) +
                         " parameter values, got " + std::to_string(opt.theta.size()));
  }
  const Vector theta = Eigen::Map<const Vector>(opt.theta.data(), static_cast<Index>(opt.theta.size()));
  const Prediction p = predict_basis(mf.surrogate, method, theta);
  const fs::path target = opt.output.empty()
                              ? fs::path(opt.out ? *opt.out : mf.config.output_dir) / "predicted_basis.gpm"
                              : fs::path(opt.output);
  write_snapshot_file(target, p.basis.matrix());
  log << to_string(method) << " prediction: |y| = " << p.y.norm() << (p.clipped ? " (clipped)" : "")
      << ", basis " << p.basis.n() << " x " << p.basis.r() << " written to " << target.string() << "\n";
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

int cmd_evaluate(const CommandOptions& opt, std::ostream& log) {
  const Manifest m = require_manifest(opt);
  std::optional<ModelFile> mf;
  RunConfig cfg;
  if (!opt.model.empty()) {
    mf = read_model(opt.model);
    if (mf->problem != m.problem) {
      throw InvalidArgument("model was trained on '" + mf->problem + "' but the manifest is '" +
                            m.problem + "'");
    }
    cfg = mf->config;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.method) cfg.method = *opt.method;
    if (opt.out) cfg.output_dir = *opt.out;
    if (mf->surrogate.chart.n() != m.n) {
      throw DimensionError("model has n = " + std::to_string(mf->surrogate.chart.n()) +
                           " but the manifest has n = " + std::to_string(m.n));
    }
    if (opt.rank && *opt.rank != mf->surrogate.chart.r()) {
      throw DimensionError("model has r = " + std::to_string(mf->surrogate.chart.r()) +
                           " but --rank is " + std::to_string(*opt.rank));
    }
    cfg.rank = mf->surrogate.chart.r();
  } else {
    cfg = config_for_manifest(opt, m);
  }
  const std::vector<Method> methods = methods_for(cfg.method);
  const auto test_idx = m.indices("test");
  if (test_idx.empty()) {
    const std::vector<CaseData> none;
    write_reports(cfg, StudyResult{}, methods, none, log);
    log << "no test cases; nothing evaluated\n";
    return kExitNoOp;
  }
  const std::vector<CaseData> cases = load_cases(m, cfg.rank);
  const auto train_idx = m.indices("train");

  StudyResult study;
  if (!mf) {
    study = run_split(cases, SplitIndices{train_idx, test_idx}, methods, cfg.surrogate);
  } else {
    if (data_fingerprint(cases, train_idx, cfg.rank) != mf->fingerprint) {
      log << "warning: the manifest's training data differs from the data the model was fit on\n";
    }
    FoldSummary fs;
    fs.test_count = test_idx.size();
    const std::string ref = mf->train_labels.at(mf->surrogate.reference.index);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (cases[i].label == ref) {
        fs.reference = i;
        fs.train_count = mf->train_labels.size();
      }
    }
    fs.max_distance = mf->surrogate.reference.max_distance;
    fs.solver_failures = mf->surrogate.trace.solver_failures;
    for (const auto& l : mf->excluded_labels) {
      for (std::size_t i = 0; i < cases.size(); ++i) {
        if (cases[i].label == l) fs.excluded.push_back(i);
      }
    }
    for (Method meth : methods) {
      auto res = evaluate(meth, &mf->surrogate, cases, test_idx, 0);
      study.cases.insert(study.cases.end(), res.begin(), res.end());
    }
    study.folds.push_back(fs);
  }
  write_reports(cfg, study, methods, cases, log);
  return any_failed(study.cases) ? kExitCaseFailures : kExitOk;
}

// ---- cv -------------------------------------------------------------------

int cmd_cv(const CommandOptions& opt, std::ostream& log) {
  const Manifest m = require_manifest(opt);
  const RunConfig cfg = config_for_manifest(opt, m);
  const std::vector<Method> methods = methods_for(cfg.method);
  if (m.entries.size() < static_cast<std::size_t>(cfg.folds)) {
    throw InvalidArgument("cv: " + std::to_string(cfg.folds) + " folds need at least as many cases (have " +
                          std::to_string(m.entries.size()) + ")");
  }
  const std::vector<CaseData> cases = load_cases(m, cfg.rank);
  const StudyResult study = run_cv(cases, cfg.folds, cfg.seed, methods, cfg.surrogate);
  write_reports(cfg, study, methods, cases, log);
  return any_failed(study.cases) ? kExitCaseFailures : kExitOk;
}

// ---- report ---------------------------------------------------------------

int cmd_report(const CommandOptions& opt, std::ostream& log) {
  const fs::path dir = opt.out ? fs::path(*opt.out) : fs::path("out");
  const fs::path src = opt.inputs.empty() ? dir / "cases.csv" : fs::path(opt.inputs[0]);
  std::string problem;
  const std::vector<CaseResult> results = read_cases_csv(src, &problem);
  std::vector<Method> methods;
  for (const CaseResult& r : results) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  log << (problem.empty() ? std::string("(empty report)") : problem) << "\n"
      << stats_table(results, methods);

  // Plot-ready error-vs-parameter curves, one file per method.
  for (Method meth : methods) {
    std::vector<const CaseResult*> rows;
    for (const CaseResult& r : results) {
      if (r.method == meth) rows.push_back(&r);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const CaseResult* a, const CaseResult* b) {
      return std::lexicographical_compare(a->theta.begin(), a->theta.end(), b->theta.begin(), b->theta.end());
    });
    std::string out;
    const Index d = rows.empty() ? 0 : rows.front()->theta.size();
    for (Index k = 0; k < d; ++k) out += "theta_" + std::to_string(k) + ",";
    out += "error,floor\n";
    char buf[64];
    for (const CaseResult* r : rows) {
      for (Index k = 0; k < d; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,", r->theta(k));
        out += buf;
      }
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r->error, r->floor);
      out += buf;
    }
    atomic_write(dir / ("curve_" + to_string(meth) + ".csv"), out);
  }
  return kExitOk;
}

}  // namespace grasspod
