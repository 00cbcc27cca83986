#include "grasspod/harness.hpp"

#include "grasspod/error.hpp"
#include "grasspod/parallel.hpp"
#include "grasspod/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace grasspod {

SplitIndices split_mod3(std::size_t count) {
  SplitIndices out;
  for (std::size_t i = 0; i < count; ++i) (i % 3 == 0 ? out.train : out.test).push_back(i);
  return out;
}

std::vector<SplitIndices> kfold(std::size_t count, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > count) {
    throw InvalidArgument("kfold: k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(count) + " available cases");
  }
  std::vector<std::size_t> perm(count);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(perm, rng);

  std::vector<SplitIndices> folds(static_cast<std::size_t>(k));
  const std::size_t base = count / static_cast<std::size_t>(k);
  const std::size_t extra = count % static_cast<std::size_t>(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    std::vector<char> in_test(count, 0);
    for (std::size_t i = start; i < start + size; ++i) in_test[perm[i]] = 1;
    for (std::size_t i = 0; i < count; ++i) (in_test[i] ? folds[f].test : folds[f].train).push_back(i);
    start += size;
  }
  return folds;
}

double relative_error(const Matrix& d_true, const PodBasis& basis) {
  if (d_true.rows() != basis.n()) throw DimensionError("relative_error: row count mismatch");
  const double total = d_true.norm();
  if (!(total > 0.0)) throw InvalidArgument("relative_error: snapshot matrix has zero norm");
  return projection_error(d_true, basis) / total;
}

ErrorStats ErrorStats::from(std::vector<double> values) {
  ErrorStats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double acc = 0.0;
    for (double v : values) acc += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(acc / (n - 1.0));
  }
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.min = values.front();
  s.max = values.back();
  s.q25 = std::clamp(quantile(0.25), s.min, s.max);
  s.median = std::clamp(quantile(0.5), s.q25, s.max);
  s.q75 = std::clamp(quantile(0.75), s.median, s.max);
  return s;
}

Method parse_method(const std::string& name) {
  if (name == "cxgb") return Method::cxgb;
  if (name == "interp") return Method::interp;
  if (name == "oracle" || name == "truth") return Method::oracle;
  throw InvalidArgument("unknown method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::cxgb: return "cxgb";
    case Method::interp: return "interp";
    case Method::oracle: return "oracle";
  }
  return "unknown";
}

std::vector<CaseData> prepare_cases(std::vector<SnapshotMatrix> snapshots, Index rank,
                                    const std::vector<std::string>& splits) {
  if (!splits.empty() && splits.size() != snapshots.size()) {
    throw InvalidArgument("prepare_cases: split labels do not match the case count");
  }
  std::vector<CaseData> cases(snapshots.size());
  parallel_for(snapshots.size(), [&](std::size_t i) {
    SnapshotMatrix& sm = snapshots[i];
    sm.validate();
    CaseData& c = cases[i];
    c.pod = compute_pod(sm, rank);
    c.label = std::move(sm.label);
    c.theta = std::move(sm.parameter);
    c.snapshots = std::move(sm.data);
    if (!splits.empty()) c.split = splits[i];
  });
  for (std::size_t i = 1; i < cases.size(); ++i) {
    if (cases[i].theta.size() != cases[0].theta.size()) {
      throw DimensionError("prepare_cases: parameter dimensions differ between cases");
    }
    if (cases[i].pod.basis.n() != cases[0].pod.basis.n()) {
      throw DimensionError("prepare_cases: snapshot row counts differ between cases");
    }
  }
  return cases;
}

Surrogate train_surrogate(const std::vector<PodBasis>& bases, const Matrix& theta,
                          const SurrogateConfig& cfg, const std::vector<std::string>& labels,
                          bool fit_cxgb, bool fit_interp) {
  if (bases.empty()) throw InvalidArgument("train_surrogate: empty training set");
  if (static_cast<std::size_t>(theta.rows()) != bases.size()) {
    throw DimensionError("train_surrogate: parameter rows do not match the basis count");
  }
  Surrogate s;
  s.reference =
      select_reference(bases, cfg.policy, cfg.reference_index, labels, cfg.drop_out_of_chart);
  s.chart = Chart(bases[s.reference.index]);
  std::vector<char> dropped(bases.size(), 0);
  for (std::size_t i : s.reference.excluded) dropped[i] = 1;
  const Index kept = static_cast<Index>(bases.size() - s.reference.excluded.size());
  s.theta.resize(kept, theta.cols());
  s.y.resize(s.chart.dim(), kept);
  Index k = 0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (dropped[i]) continue;
    s.theta.row(k) = theta.row(static_cast<Index>(i));
    s.y.col(k) = embed(s.chart, bases[i]);
    ++k;
  }
  if (fit_cxgb) {
    TrainConfig tc = cfg.train;
    tc.radius = s.chart.radius();
    s.model = fit(EmbeddedDataset{s.theta, s.y}, tc, &s.trace);
  }
  if (fit_interp) {
    InterpScheme scheme = cfg.scheme;
    if (scheme == InterpScheme::automatic && s.theta.cols() == 1 && s.theta.rows() < 2) {
      scheme = InterpScheme::idw;  // a single node: constant prediction
    }
    s.interp.emplace(s.theta, s.y, scheme, s.chart.radius());
  }
  return s;
}

Surrogate train_surrogate(const std::vector<CaseData>& cases,
                          const std::vector<std::size_t>& train_idx, const SurrogateConfig& cfg,
                          bool fit_cxgb, bool fit_interp) {
  if (train_idx.empty()) throw InvalidArgument("train_surrogate: empty training split");
  std::vector<PodBasis> bases;
  std::vector<std::string> labels;
  Matrix theta(static_cast<Index>(train_idx.size()), cases.at(train_idx[0]).theta.size());
  for (std::size_t k = 0; k < train_idx.size(); ++k) {
    const CaseData& c = cases.at(train_idx[k]);
    bases.push_back(c.pod.basis);
    labels.push_back(c.label);
    theta.row(static_cast<Index>(k)) = c.theta.transpose();
  }
  return train_surrogate(bases, theta, cfg, labels, fit_cxgb, fit_interp);
}

Prediction predict_basis(const Surrogate& s, Method method, const Eigen::Ref<const Vector>& theta) {
  Prediction p;
  if (method == Method::cxgb) {
    if (s.model.input_dim == 0) throw InvalidArgument("surrogate has no boosted model");
    p.y = s.model.predict(theta);
  } else if (method == Method::interp) {
    if (!s.interp) throw InvalidArgument("surrogate has no interpolation model");
    InterpPrediction ip = s.interp->predict(theta);
    p.y = std::move(ip.y);
    p.clipped = ip.clipped;
  } else {
    throw InvalidArgument("the oracle has no surrogate prediction");
  }
  if (!p.y.allFinite()) throw NonFiniteError("prediction is not finite");
  const double limit = s.chart.radius() - 1e-9;
  const double nrm = p.y.norm();
  if (nrm > limit) {
    p.y *= limit / nrm;
    p.clipped = true;
  }
  p.basis = wrap_back(s.chart, p.y);
  return p;
}

std::vector<CaseResult> evaluate(Method method, const Surrogate* s,
                                 const std::vector<CaseData>& cases,
                                 const std::vector<std::size_t>& test_idx, int fold) {
  if (method != Method::oracle && s == nullptr) {
    throw InvalidArgument("evaluate: method " + to_string(method) + " needs a trained surrogate");
  }
  std::vector<CaseResult> out(test_idx.size());
  parallel_for(test_idx.size(), [&](std::size_t k) {
    const CaseData& c = cases.at(test_idx[k]);
    CaseResult& r = out[k];
    r.fold = fold;
    r.label = c.label;
    r.theta = c.theta;
    r.method = method;
    r.floor = c.pod.truncation_floor();
    try {
      if (method == Method::oracle) {
        r.error = relative_error(c.snapshots, c.pod.basis);
      } else {
        const Prediction p = predict_basis(*s, method, c.theta);
        r.clipped = p.clipped;
        r.error = relative_error(c.snapshots, p.basis);
      }
    } catch (const Error& e) {
      r.failed = true;
      r.error = std::nan("");
      r.message = e.what();
    }
  });
  return out;
}

ErrorStats summarize(const std::vector<CaseResult>& results, Method method) {
  std::vector<double> v;
  for (const CaseResult& r : results) {
    if (r.method == method && !r.failed) v.push_back(r.error);
  }
  return ErrorStats::from(std::move(v));
}

namespace {

bool needs_surrogate(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

StudyResult run_one(const std::vector<CaseData>& cases, const SplitIndices& split,
                    const std::vector<Method>& methods, const SurrogateConfig& cfg, int fold) {
  StudyResult out;
  FoldSummary fs;
  fs.fold = fold;
  fs.train_count = split.train.size();
  fs.test_count = split.test.size();
  const bool want_cxgb = needs_surrogate(methods, Method::cxgb);
  const bool want_interp = needs_surrogate(methods, Method::interp);
  std::optional<Surrogate> s;
  if (want_cxgb || want_interp) {
    s = train_surrogate(cases, split.train, cfg, want_cxgb, want_interp);
    fs.reference = split.train[s->reference.index];
    fs.max_distance = s->reference.max_distance;
    fs.solver_failures = s->trace.solver_failures;
    for (std::size_t i : s->reference.excluded) fs.excluded.push_back(split.train[i]);
  }
  for (Method m : methods) {
    auto res = evaluate(m, s ? &*s : nullptr, cases, split.test, fold);
    out.cases.insert(out.cases.end(), res.begin(), res.end());
  }
  out.folds.push_back(fs);
  return out;
}

}  // namespace

StudyResult run_split(const std::vector<CaseData>& cases, const SplitIndices& split,
                      const std::vector<Method>& methods, const SurrogateConfig& cfg) {
  return run_one(cases, split, methods, cfg, 0);
}

StudyResult run_cv(const std::vector<CaseData>& cases, int k, std::uint64_t seed,
                   const std::vector<Method>& methods, const SurrogateConfig& cfg) {
  const auto folds = kfold(cases.size(), k, seed);
  std::vector<StudyResult> parts(folds.size());
  parallel_for(folds.size(), [&](std::size_t f) {
    parts[f] = run_one(cases, folds[f], methods, cfg, static_cast<int>(f));
  });
  StudyResult out;
  for (auto& p : parts) {
    out.cases.insert(out.cases.end(), p.cases.begin(), p.cases.end());
    out.folds.insert(out.folds.end(), p.folds.begin(), p.folds.end());
  }
  return out;
}

}  // namespace grasspod
