// Command-line front end: generate, features, detect, aggregate, abstract,
// replay. Exit status 0 on success, 1 on invalid input, 2 on I/O failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocad/pipeline.hpp"

namespace {

void add_feature_options(CLI::App* sub, ocad::PipelineConfig& c) {
  sub->add_option("--input,-i", c.input, "OCEL 2.0 JSON log")->required();
  sub->add_option("--object-type,-t", c.object_type, "object type to describe");
  sub->add_option("--keep-activity", c.keep_activities,
                  "restrict the log to these activities (repeatable)");
  sub->add_option("--propagate-from", c.propagate_from,
                  "neighbor object type whose features are aggregated onto each row");
  sub->add_option("--aggregation", c.aggregation, "mean|median|min|max|sum");
  sub->add_option("--epsilon", c.epsilon, "normalization guard");
  sub->add_option("--min-variance", c.min_variance, "drop columns with variance at or below");
  sub->add_flag("--cobirth-codeath", c.cobirth_codeath, "add co-birth and co-death counts");
}

void add_detect_options(CLI::App* sub, ocad::PipelineConfig& c) {
  sub->add_option("--detector", c.detector, "auto|iforest|lof");
  sub->add_option("--reducer", c.reducer, "none|pca|fastmap");
  sub->add_option("--dims", c.dims, "embedding dimensions");
  sub->add_option("--pivot-iters", c.pivot_iters, "FastMap pivot sweeps");
  sub->add_option("--trees", c.n_trees, "isolation trees");
  sub->add_option("--subsample", c.subsample, "isolation tree sample size");
  sub->add_option("--lof-k", c.lof_k, "LOF neighborhood size");
  sub->add_option("--seed", c.seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  ocad::PipelineConfig c;
  std::string out_dir = ".";
  std::string manifest_path;

  CLI::App app{"Object-centric anomaly detection over OCEL 2.0 logs"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "synthetic purchase-to-pay log with planted anomalies");
  std::vector<std::string> rates;
  gen->add_option("--orders", c.n_orders, "number of orders");
  gen->add_option("--rate", rates, "Kind=fraction, e.g. MaverickBuying=0.05 (repeatable)");
  gen->add_option("--seed", c.seed, "random seed");
  gen->add_option("--mean-gap", c.mean_gap, "mean seconds between steps of an order");
  gen->add_option("--mean-arrival", c.mean_arrival, "mean seconds between orders");
  gen->add_option("--reopen-gap-factor", c.reopen_gap_factor, "reopen wait in mean gaps");

  auto* feat = app.add_subcommand("features", "feature matrix, raw and normalized");
  add_feature_options(feat, c);

  auto* det = app.add_subcommand("detect", "object scores, ranks and lifecycles of the worst");
  add_feature_options(det, c);
  add_detect_options(det, c);
  det->add_option("--top-k", c.top_k, "lifecycles written for the k most anomalous");
  det->add_option("--max-events", c.max_events, "lifecycle events shown before eliding");

  auto* agg = app.add_subcommand("aggregate", "feature scores from object scores");
  add_feature_options(agg, c);
  add_detect_options(agg, c);
  agg->add_option("--top-n", c.top_n, "rows of the feature report");

  auto* abs = app.add_subcommand("abstract", "feature summary and oracle verdicts");
  add_feature_options(abs, c);
  abs->add_option("--oracle", c.oracle, "statistical|llm");
  abs->add_option("--whisker", c.whisker, "fence width in interquartile ranges");
  abs->add_flag("--raw-table", c.raw_table, "also write the raw feature table");
  abs->add_option("--endpoint", c.endpoint, "chat-completions URL for the llm oracle");
  abs->add_option("--model", c.model, "model name sent to the endpoint");
  abs->add_option("--api-key-env", c.api_key_env, "environment variable holding the API key");
  abs->add_option("--timeout-ms", c.timeout_ms, "request timeout");
  abs->add_option("--object", c.lifecycle_object, "also abstract this object's lifecycle");
  abs->add_option("--max-events", c.max_events, "lifecycle events shown before eliding");

  auto* rep = app.add_subcommand("replay", "rerun a run.json and compare output digests");
  rep->add_option("--manifest,-m", manifest_path, "run.json of the original run")->required();

  for (auto* sub : {gen, feat, det, agg, abs, rep}) {
    sub->add_option("--out,-o", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (rep->parsed()) {
      const auto report = ocad::replay(ocad::read_manifest(manifest_path), out_dir);
      if (!report.reproducible) {
        std::cerr << "note: the original run queried an LLM; its replies are not reproducible\n";
      }
      if (!report.input_matches) std::cerr << "input digest differs from the manifest\n";
      for (const auto& f : report.mismatched) std::cerr << "differs: " << f << "\n";
      for (const auto& f : report.unexpected) std::cerr << "not in manifest: " << f << "\n";
      if (report.identical()) {
        std::cout << "replay identical\n";
        return 0;
      }
      return 1;
    }
    for (const std::string& r : rates) {
      const auto eq = r.find('=');
      if (eq == std::string::npos) {
        throw ocad::Error(ocad::ErrorKind::kInvalidConfig, "--rate expects Kind=fraction");
      }
      c.anomaly_rates[ocad::parse_anomaly_kind(r.substr(0, eq))] =
          ocad::parse_double(r.substr(eq + 1));
    }
    c.command = app.get_subcommands().front()->get_name();
    c.output_dir = out_dir;
    const auto manifest = ocad::run_and_write(c);
    for (const auto& w : manifest["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    return 0;
  } catch (const ocad::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ocad::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
