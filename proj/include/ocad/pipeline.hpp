#pragma once

// Subcommand composition behind the CLI: each run maps a PipelineConfig to a
// set of named output files plus a run.json manifest that replays it.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocad/aggregate.hpp"
#include "ocad/csv.hpp"
#include "ocad/detect.hpp"
#include "ocad/digest.hpp"
#include "ocad/error.hpp"
#include "ocad/features.hpp"
#include "ocad/llm_client.hpp"
#include "ocad/ocel_json.hpp"
#include "ocad/oracle.hpp"
#include "ocad/prompts.hpp"
#include "ocad/reduce.hpp"
#include "ocad/synthgen.hpp"

namespace ocad {

inline constexpr const char* kToolName = "ocad";
inline constexpr int kManifestVersion = 1;
inline constexpr const char* kManifestFile = "run.json";

struct PipelineConfig {
  std::string command;  // generate | features | detect | aggregate | abstract
  std::string input;
  ObjectType object_type = "order";

  // features
  std::vector<Activity> keep_activities;
  ObjectType propagate_from;
  std::string aggregation = "mean";
  double epsilon = kDefaultEpsilon;
  double min_variance = 0.0;
  bool cobirth_codeath = false;

  // detect / aggregate
  std::string detector = "auto";  // auto | iforest | lof
  std::string reducer = "none";   // none | pca | fastmap
  std::size_t dims = kDefaultFastMapDims;
  std::size_t pivot_iters = kDefaultPivotIters;
  std::size_t n_trees = 100;
  std::size_t subsample = 256;
  std::size_t lof_k = 20;
  std::size_t top_k = 10;
  std::size_t top_n = 20;
  std::size_t max_events = kDefaultMaxLifecycleEvents;
  std::uint64_t seed = 0;

  // abstract
  std::string oracle = "statistical";  // statistical | llm
  double whisker = kDefaultWhisker;
  bool raw_table = false;  // also export the raw feature table
  std::string endpoint;
  std::string model = "gpt-4-turbo";
  std::string api_key_env = "OCAD_API_KEY";
  std::size_t timeout_ms = 60000;
  ObjectId lifecycle_object;

  // generate
  std::size_t n_orders = 100;
  std::map<AnomalyKind, double> anomaly_rates;
  double mean_gap = 21600.0;
  double mean_arrival = 3600.0;
  double reopen_gap_factor = 100.0;

  // Not part of the manifest.
  std::filesystem::path output_dir;
};

inline std::string methodology_of(const std::string& command) {
  if (command == "abstract") return "af1";
  if (command == "detect") return "af2";
  if (command == "aggregate") return "af3";
  return "";
}

inline DetectorKind resolve_detector(const PipelineConfig& c) {
  if (c.detector == "iforest") return DetectorKind::kIsolationForest;
  if (c.detector == "lof") return DetectorKind::kLof;
  return c.reducer == "fastmap" ? DetectorKind::kLof : DetectorKind::kIsolationForest;
}

inline void validate(const PipelineConfig& c) {
  static const std::set<std::string> kCommands{"generate", "features", "detect", "aggregate",
                                               "abstract"};
  auto bad = [](const std::string& msg) { throw Error(ErrorKind::kInvalidConfig, msg); };
  if (!kCommands.count(c.command)) bad("unknown command '" + c.command + "'");
  if (c.command == "generate") {
    SynthConfig s;
    s.n_orders = c.n_orders;
    s.anomaly_rates = c.anomaly_rates;
    s.mean_gap = c.mean_gap;
    s.mean_arrival = c.mean_arrival;
    s.reopen_gap_factor = c.reopen_gap_factor;
    validate(s);
    return;
  }
  if (c.input.empty()) bad(c.command + " needs an input log");
  if (c.object_type.empty()) bad("object type must not be empty");
  parse_aggregation(c.aggregation);
  if (!(c.epsilon > 0.0)) bad("epsilon must be positive");
  if (!(c.min_variance >= 0.0)) bad("min variance must be >= 0");
  if (c.detector != "auto" && c.detector != "iforest" && c.detector != "lof") {
    bad("unknown detector '" + c.detector + "'");
  }
  if (c.reducer != "none" && c.reducer != "pca" && c.reducer != "fastmap") {
    bad("unknown reducer '" + c.reducer + "'");
  }
  if (c.reducer != "none" && c.dims == 0) bad("dims must be >= 1");
  if (c.oracle != "statistical" && c.oracle != "llm") bad("unknown oracle '" + c.oracle + "'");
  if (c.command == "abstract" && c.oracle == "llm" && c.endpoint.empty()) {
    bad("the llm oracle needs an endpoint URL");
  }
}

inline nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["input"] = c.input;
  j["object_type"] = c.object_type;
  j["keep_activities"] = c.keep_activities;
  j["propagate_from"] = c.propagate_from;
  j["aggregation"] = c.aggregation;
  j["epsilon"] = c.epsilon;
  j["min_variance"] = c.min_variance;
  j["cobirth_codeath"] = c.cobirth_codeath;
  j["detector"] = c.detector;
  j["reducer"] = c.reducer;
  j["dims"] = c.dims;
  j["pivot_iters"] = c.pivot_iters;
  j["n_trees"] = c.n_trees;
  j["subsample"] = c.subsample;
  j["lof_k"] = c.lof_k;
  j["top_k"] = c.top_k;
  j["top_n"] = c.top_n;
  j["max_events"] = c.max_events;
  j["seed"] = c.seed;
  j["oracle"] = c.oracle;
  j["whisker"] = c.whisker;
  j["raw_table"] = c.raw_table;
  j["endpoint"] = c.endpoint;
  j["model"] = c.model;
  j["api_key_env"] = c.api_key_env;
  j["timeout_ms"] = c.timeout_ms;
  j["lifecycle_object"] = c.lifecycle_object;
  j["n_orders"] = c.n_orders;
  nlohmann::ordered_json rates = nlohmann::ordered_json::object();
  for (const auto& [kind, rate] : c.anomaly_rates) rates[to_string(kind)] = rate;
  j["anomaly_rates"] = std::move(rates);
  j["mean_gap"] = c.mean_gap;
  j["mean_arrival"] = c.mean_arrival;
  j["reopen_gap_factor"] = c.reopen_gap_factor;
  return j;
}

inline PipelineConfig config_from_json(const nlohmann::ordered_json& j) {
  PipelineConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    c.input = j.at("input").get<std::string>();
    c.object_type = j.at("object_type").get<std::string>();
    c.keep_activities = j.at("keep_activities").get<std::vector<std::string>>();
    c.propagate_from = j.at("propagate_from").get<std::string>();
    c.aggregation = j.at("aggregation").get<std::string>();
    c.epsilon = j.at("epsilon").get<double>();
    c.min_variance = j.at("min_variance").get<double>();
    c.cobirth_codeath = j.at("cobirth_codeath").get<bool>();
    c.detector = j.at("detector").get<std::string>();
    c.reducer = j.at("reducer").get<std::string>();
    c.dims = j.at("dims").get<std::size_t>();
    c.pivot_iters = j.at("pivot_iters").get<std::size_t>();
    c.n_trees = j.at("n_trees").get<std::size_t>();
    c.subsample = j.at("subsample").get<std::size_t>();
    c.lof_k = j.at("lof_k").get<std::size_t>();
    c.top_k = j.at("top_k").get<std::size_t>();
    c.top_n = j.at("top_n").get<std::size_t>();
    c.max_events = j.at("max_events").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.oracle = j.at("oracle").get<std::string>();
    c.whisker = j.at("whisker").get<double>();
    c.raw_table = j.at("raw_table").get<bool>();
    c.endpoint = j.at("endpoint").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.api_key_env = j.at("api_key_env").get<std::string>();
    c.timeout_ms = j.at("timeout_ms").get<std::size_t>();
    c.lifecycle_object = j.at("lifecycle_object").get<std::string>();
    c.n_orders = j.at("n_orders").get<std::size_t>();
    for (const auto& [name, rate] : j.at("anomaly_rates").items()) {
      c.anomaly_rates[parse_anomaly_kind(name)] = rate.get<double>();
    }
    c.mean_gap = j.at("mean_gap").get<double>();
    c.mean_arrival = j.at("mean_arrival").get<double>();
    c.reopen_gap_factor = j.at("reopen_gap_factor").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, std::string("bad config: ") + e.what());
  }
  return c;
}

// Output files keyed by path relative to the output directory.
struct RunResult {
  std::map<std::string, std::string> files;
  std::vector<std::string> warnings;
  bool reproducible = true;
};

namespace detail {

inline std::string sanitize_file_part(const std::string& s) {
  std::string out = s;
  for (char& ch : out) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    if (!ok) ch = '_';
  }
  return out;
}

struct Prepared {
  FeatureMatrix raw;  // after optional propagation
  NormalizedFeatureMatrix normalized;  // after the variance filter
};

inline OcelLog load_log(const PipelineConfig& c) {
  OcelLog log = read_ocel_file(c.input);
  if (!c.keep_activities.empty()) {
    log = filter_activities(log, {c.keep_activities.begin(), c.keep_activities.end()});
  }
  return log;
}

inline FeatureMatrix extract_raw(const OcelLog& log, const PipelineConfig& c) {
  const ExtractionConfig ex{c.cobirth_codeath};
  FeatureMatrix f = extract_features(log, c.object_type, ex);
  if (!c.propagate_from.empty()) {
    const FeatureMatrix nb = extract_features(log, c.propagate_from, ex);
    f = propagate_features(log, f, nb, parse_aggregation(c.aggregation));
  }
  return f;
}

inline Prepared prepare(const OcelLog& log, const PipelineConfig& c) {
  Prepared p;
  p.raw = extract_raw(log, c);
  p.normalized = variance_filter(normalize(p.raw, c.epsilon), c.min_variance);
  return p;
}

inline ScoreVector score(const FeatureMatrix& fnorm, const PipelineConfig& c) {
  FeatureMatrix input = fnorm;
  if (c.reducer != "none") {
    const std::size_t k = std::min({c.dims, fnorm.rows(), fnorm.cols()});
    input = c.reducer == "pca" ? pca(fnorm, k).coords
                               : fastmap(fnorm, k, c.pivot_iters, c.seed).coords;
  }
  ScoreVector s = resolve_detector(c) == DetectorKind::kLof
                      ? lof(input, {c.lof_k})
                      : isolation_forest(input, {c.n_trees, c.subsample, c.seed});
  s.object_ids = fnorm.row_ids;
  if (c.reducer != "none") s.params["reducer"] = c.reducer;
  return s;
}

inline std::string render_ranked_scores(const ScoreVector& s, const RankVector& r) {
  std::vector<std::size_t> order(r.ranks.size());
  for (std::size_t i = 0; i < r.ranks.size(); ++i) order[r.ranks[i]] = i;
  std::vector<ObjectId> ids;
  std::vector<double> col;
  for (std::size_t i : order) {
    ids.push_back(s.object_ids[i]);
    col.push_back(s.scores[i]);
  }
  return render_score_table({to_string(s.method)}, ids, {col});
}

inline std::string ask_llm(const PipelineConfig& c, const std::string& prompt,
                           std::string_view preamble) {
  LlmEndpoint ep;
  ep.url = c.endpoint;
  ep.model = c.model;
  ep.timeout = std::chrono::milliseconds(c.timeout_ms);
  if (const char* key = std::getenv(c.api_key_env.c_str())) ep.api_key = key;
  return llm_oracle(ep, prompt, preamble);
}

}  // namespace detail

inline RunResult run_pipeline(const PipelineConfig& c) {
  validate(c);
  RunResult out;

  if (c.command == "generate") {
    SynthConfig s;
    s.n_orders = c.n_orders;
    s.anomaly_rates = c.anomaly_rates;
    s.seed = c.seed;
    s.mean_gap = c.mean_gap;
    s.mean_arrival = c.mean_arrival;
    s.reopen_gap_factor = c.reopen_gap_factor;
    const auto [log, truth] = generate_p2p(s);
    out.files["log.json"] = serialize_ocel_json(log);
    out.files["ground_truth.csv"] = ground_truth_to_csv(truth);
    return out;
  }

  const OcelLog log = detail::load_log(c);

  if (c.command == "abstract") {
    const FeatureMatrix raw = detail::extract_raw(log, c);
    const FeatureSummary summary = summarize_features(raw);
    const std::string text = render_summary(summary, c.object_type);
    out.files["summary.txt"] = text;
    out.files["verdicts.csv"] = verdicts_to_csv(statistical_oracle(summary, c.whisker));
    if (c.raw_table) out.files["features.csv"] = to_csv(raw);
    std::string life;
    if (!c.lifecycle_object.empty()) {
      life = abstract_lifecycle(log, c.lifecycle_object, c.max_events);
      out.files["lifecycle_" + detail::sanitize_file_part(c.lifecycle_object) + ".txt"] = life;
    }
    if (c.oracle == "llm") {
      out.reproducible = false;
      out.files["llm_reply.txt"] = detail::ask_llm(c, text, prompts::kFeatureTablePreamble);
      if (!life.empty()) {
        out.files["llm_lifecycle_reply.txt"] = detail::ask_llm(c, life, prompts::kLifecyclePreamble);
      }
    }
    return out;
  }

  const detail::Prepared p = detail::prepare(log, c);
  if (c.command == "features") {
    out.files["features.csv"] = to_csv(p.raw);
    out.files["features_normalized.csv"] = to_csv(p.normalized.matrix);
    return out;
  }

  const ScoreVector s = detail::score(p.normalized.matrix, c);
  out.warnings = s.warnings;
  if (c.command == "detect") {
    const RankVector r = rank(s);
    out.files["scores.csv"] = scores_to_csv(s);
    out.files["ranks.csv"] = ranks_to_csv(r);
    out.files["scores.txt"] = detail::render_ranked_scores(s, r);
    const auto worst = bottom_k(r, std::min(c.top_k, r.ranks.size()));
    for (std::size_t i = 0; i < worst.size(); ++i) {
      char prefix[16];
      std::snprintf(prefix, sizeof prefix, "%03zu_", i);
      out.files["lifecycles/" + std::string(prefix) + detail::sanitize_file_part(worst[i]) +
                ".txt"] = abstract_lifecycle(log, worst[i], c.max_events);
    }
    return out;
  }

  // aggregate
  const FeatureScoreTable t = anomalous_feature_report(p.raw, s, c.top_n);
  out.files["feature_scores.csv"] = feature_scores_to_csv(t);
  out.files["feature_scores.txt"] = render_feature_table(t);
  return out;
}

inline nlohmann::ordered_json make_manifest(const PipelineConfig& c, const RunResult& r) {
  nlohmann::ordered_json m;
  m["tool"] = kToolName;
  m["manifest_version"] = kManifestVersion;
  m["command"] = c.command;
  m["methodology"] = methodology_of(c.command);
  m["config"] = config_to_json(c);
  m["input_sha256"] = c.input.empty() ? "" : sha256_hex(read_text_file(c.input));
  m["reproducible"] = r.reproducible;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  for (const auto& [name, content] : r.files) outputs[name] = sha256_hex(content);
  m["outputs"] = std::move(outputs);
  m["warnings"] = r.warnings;
  return m;
}

// Writes every output file and run.json under c.output_dir.
inline nlohmann::ordered_json write_run(const PipelineConfig& c, const RunResult& r) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                "cannot create '" + c.output_dir.string() + "': " + ec.message());
  }
  for (const auto& [name, content] : r.files) {
    const fs::path path = c.output_dir / name;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create '" + path.parent_path().string() + "'");
    write_file_atomic(path, content);
  }
  nlohmann::ordered_json manifest = make_manifest(c, r);
  write_file_atomic(c.output_dir / kManifestFile, manifest.dump(2) + "\n");
  return manifest;
}

inline nlohmann::ordered_json run_and_write(const PipelineConfig& c) {
  return write_run(c, run_pipeline(c));
}

inline nlohmann::ordered_json read_manifest(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    auto m = nlohmann::ordered_json::parse(text);
    if (m.value("tool", "") != kToolName ||
        m.value("manifest_version", 0) != kManifestVersion) {
      throw Error(ErrorKind::kInvalidConfig, "'" + path + "' is not a run manifest");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, "'" + path + "': " + e.what());
  }
}

struct ReplayReport {
  bool reproducible = true;  // false when the original run called an LLM
  bool input_matches = true;
  std::vector<std::string> mismatched;  // outputs whose digest differs or is missing
  std::vector<std::string> unexpected;  // outputs the replay made but the manifest lacks

  bool identical() const {
    return input_matches && mismatched.empty() && unexpected.empty();
  }
};

// Re-executes the manifest's config into `out_dir` and compares every output
// digest with the recorded one.
inline ReplayReport replay(const nlohmann::ordered_json& manifest,
                           const std::filesystem::path& out_dir) {
  ReplayReport rep;
  PipelineConfig c;
  try {
    c = config_from_json(manifest.at("config"));
    rep.reproducible = manifest.at("reproducible").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidConfig, std::string("bad manifest: ") + e.what());
  }
  c.output_dir = out_dir;
  const auto fresh = run_and_write(c);
  rep.input_matches = fresh["input_sha256"] == manifest["input_sha256"];
  const auto& want = manifest.at("outputs");
  const auto& got = fresh.at("outputs");
  for (const auto& [name, digest] : want.items()) {
    if (!got.contains(name) || got.at(name) != digest) rep.mismatched.push_back(name);
  }
  for (const auto& [name, digest] : got.items()) {
    if (!want.contains(name)) rep.unexpected.push_back(name);
  }
  return rep;
}

// 1 for invalid input or configuration, 2 for I/O and transport failures.
inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::kIo:
    case ErrorKind::kTimeout:
    case ErrorKind::kHttpError:
    case ErrorKind::kResponseSchema:
      return 2;
    default:
      return 1;
  }
}

}  // namespace ocad
