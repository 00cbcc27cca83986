#include "grasspod/commands.hpp"
#include "grasspod/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using grasspod::CommandOptions;

void common_flags(CLI::App* app, CommandOptions& o, bool with_method = true) {
  app->add_option("--config", o.config, "JSON run config")->check(CLI::ExistingFile);
  app->add_option("--problem", o.problem, "burgers, beam, wave or external");
  app->add_option("--seed", o.seed, "seed for subsampling and fold assignment");
  app->add_option("--rank", o.rank, "POD rank r")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "output directory");
  if (with_method) {
    app->add_option("--method", o.method, "cxgb, interp, oracle or both")
        ->check(CLI::IsMember({"cxgb", "interp", "oracle", "truth", "both"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric POD basis prediction on the Grassmann manifold"};
  app.require_subcommand(1);
  CommandOptions o;

  auto* gen = app.add_subcommand("generate", "simulate a problem's parameter grid");
  common_flags(gen, o, false);

  auto* imp = app.add_subcommand("import", "convert CSV snapshot matrices");
  common_flags(imp, o, false);
  imp->add_option("inputs", o.inputs, "CSV files (or one list file with --list)")->required();
  imp->add_flag("--list", o.list, "input is a list of 'path,theta...' rows; writes a manifest");
  imp->add_option("--output", o.output, "target file for a single CSV");

  auto* pod = app.add_subcommand("pod", "per-case POD bases and truncation floors");
  common_flags(pod, o, false);
  pod->add_option("--manifest", o.manifest)->required();

  auto* train = app.add_subcommand("train", "fit a surrogate on the manifest's training split");
  common_flags(train, o, false);
  train->add_option("--manifest", o.manifest)->required();

  auto* pred = app.add_subcommand("predict", "predict a POD basis at one parameter");
  common_flags(pred, o);
  pred->add_option("--model", o.model)->required();
  pred->add_option("--theta", o.theta, "parameter values")->required()->delimiter(',');
  pred->add_option("--output", o.output, "target snapshot file for the basis");

  auto* eval = app.add_subcommand("evaluate", "score a model (or a fresh fit) on the test split");
  common_flags(eval, o);
  eval->add_option("--manifest", o.manifest)->required();
  eval->add_option("--model", o.model, "trained model; without it the train split is fit first");

  auto* cv = app.add_subcommand("cv", "k-fold cross-validation");
  common_flags(cv, o);
  cv->add_option("--manifest", o.manifest)->required();
  cv->add_option("--folds", o.folds)->check(CLI::Range(2, 1 << 20));

  auto* rep = app.add_subcommand("report", "summarize a cases CSV");
  rep->add_option("--out", o.out, "directory holding cases.csv; curves are written here");
  rep->add_option("cases", o.inputs, "cases CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return grasspod::cmd_generate(o, std::cout);
    if (*imp) return grasspod::cmd_import(o, std::cout);
    if (*pod) return grasspod::cmd_pod(o, std::cout);
    if (*train) return grasspod::cmd_train(o, std::cout);
    if (*pred) return grasspod::cmd_predict(o, std::cout);
    if (*eval) return grasspod::cmd_evaluate(o, std::cout);
    if (*cv) return grasspod::cmd_cv(o, std::cout);
    if (*rep) return grasspod::cmd_report(o, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return grasspod::kExitFatal;
  }
  return grasspod::kExitFatal;
}
