/*
 * Copyright (C) 2026 The tcast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file pipeline.hpp
 * @brief End-to-end orchestration: ingest, fill, denoise, outlier handling,
 *        lag selection, windowing, training, prediction and metrics, with
 *        every intermediate written to an output directory and hashed into a
 *        manifest.
 *
 * Needs OpenSSL (libcrypto) for SHA-256 and nlohmann/json.
 */

#pragma once

#include <tcast/emd.hpp>
#include <tcast/error.hpp>
#include <tcast/eval.hpp>
#include <tcast/io.hpp>
#include <tcast/lagsel.hpp>
#include <tcast/outlier.hpp>
#include <tcast/seqmodels.hpp>
#include <tcast/series.hpp>
#include <tcast/synth.hpp>

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tcast::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class EvalTarget { Observed, Processed, Clean };

inline std::string_view to_string(EvalTarget t) noexcept {
  switch (t) {
    case EvalTarget::Observed: return "observed";
    case EvalTarget::Processed: return "processed";
    case EvalTarget::Clean: return "clean";
  }
  return "?";
}

struct PipelineConfig {
  std::string input;
  /// Optional synth sidecar with the clean signal and spike positions.
  std::string ground_truth;
  std::string output_dir = "out";
  std::int64_t interval = 0;
  bool divide_by_interval = true;

  bool denoise = true;
  bool outliers = true;
  outlier::MitigationMode mitigation = outlier::MitigationMode::Neighbor;
  std::size_t k_min = 2, k_max = 24;
  std::size_t knn_window = 13;

  std::size_t p_min = 2, p_max = 24;
  std::size_t q_min = 2, q_max = 24;
  std::size_t d = 1;
  /// Non-zero skips the ARIMA grid and uses this many lags.
  std::size_t lags = 0;

  seq::ModelSpec model{};
  double train_frac = 0.70;
  /// Unset: clean when ground truth is given, observed otherwise.
  std::optional<EvalTarget> eval_target;
  std::size_t acf_max_lag = 48;

  /// Architectures for compare.
  std::vector<seq::Architecture> architectures{std::begin(seq::kAllArchitectures),
                                               std::end(seq::kAllArchitectures)};

  void validate() const {
    require(train_frac > 0.0 && train_frac < 1.0, Errc::ConfigError, "train_frac must lie in (0, 1)");
    require(k_min >= 1 && k_min <= k_max, Errc::ConfigError, "k_min must be in [1, k_max]");
    require(knn_window >= 1, Errc::ConfigError, "knn_window must be >= 1");
    require(p_min <= p_max && q_min <= q_max, Errc::ConfigError, "empty ARIMA grid");
    require(!architectures.empty(), Errc::ConfigError, "no architectures selected");
    model.validate();
  }

  EvalTarget resolved_target() const {
    if (eval_target) return *eval_target;
    return ground_truth.empty() ? EvalTarget::Observed : EvalTarget::Clean;
  }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  std::string k = v;
  for (auto& c : k) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (k == "1" || k == "true" || k == "on" || k == "yes") return true;
  if (k == "0" || k == "false" || k == "off" || k == "no") return false;
  fail(Errc::ConfigError, key + ": expected a boolean, got '" + v + "'");
}

inline std::uint64_t parse_count(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos == v.size() && x >= 0) return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
  }
  fail(Errc::ConfigError, key + ": expected a non-negative integer, got '" + v + "'");
}

inline double parse_real(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  fail(Errc::ConfigError, key + ": expected a number, got '" + v + "'");
}

/// "2:24" or "2-24" or "2,24".
inline std::pair<std::size_t, std::size_t> parse_range(const std::string& v, const std::string& key) {
  const auto sep = v.find_first_of(":-,");
  require(sep != std::string::npos, Errc::ConfigError, key + ": expected a range like 2:24");
  return {parse_count(io::trim(v.substr(0, sep)), key), parse_count(io::trim(v.substr(sep + 1)), key)};
}

}  // namespace detail

inline outlier::MitigationMode parse_mitigation(const std::string& v) {
  if (v == "neighbor" || v == "neighbour") return outlier::MitigationMode::Neighbor;
  if (v == "preceding") return outlier::MitigationMode::Preceding;
  fail(Errc::ConfigError, "unknown mitigation mode '" + v + "'");
}

inline EvalTarget parse_eval_target(const std::string& v) {
  if (v == "observed") return EvalTarget::Observed;
  if (v == "processed") return EvalTarget::Processed;
  if (v == "clean") return EvalTarget::Clean;
  fail(Errc::ConfigError, "unknown eval_target '" + v + "'");
}

/// Applies one `key = value` setting; unknown keys are a ConfigError.
inline void set_option(PipelineConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "input") c.input = value;
  else if (key == "ground_truth") c.ground_truth = value;
  else if (key == "output_dir") c.output_dir = value;
  else if (key == "interval") c.interval = static_cast<std::int64_t>(parse_count(value, key));
  else if (key == "divide_by_interval") c.divide_by_interval = parse_bool(value, key);
  else if (key == "denoise") c.denoise = parse_bool(value, key);
  else if (key == "outliers") c.outliers = parse_bool(value, key);
  else if (key == "mitigation") c.mitigation = parse_mitigation(value);
  else if (key == "k_range") std::tie(c.k_min, c.k_max) = parse_range(value, key);
  else if (key == "knn_window") c.knn_window = parse_count(value, key);
  else if (key == "p_range") std::tie(c.p_min, c.p_max) = parse_range(value, key);
  else if (key == "q_range") std::tie(c.q_min, c.q_max) = parse_range(value, key);
  else if (key == "d") c.d = parse_count(value, key);
  else if (key == "lags") c.lags = parse_count(value, key);
  else if (key == "architecture") c.model.architecture = seq::parse_architecture(value);
  else if (key == "architectures") {
    c.architectures.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = io::trim(item);
      if (item == "all") {
        c.architectures.assign(std::begin(seq::kAllArchitectures), std::end(seq::kAllArchitectures));
        continue;
      }
      if (!item.empty()) c.architectures.push_back(seq::parse_architecture(item));
    }
  } else if (key == "hidden_size") c.model.hidden_size = parse_count(value, key);
  else if (key == "epochs") c.model.epochs = parse_count(value, key);
  else if (key == "batch_size") c.model.batch_size = parse_count(value, key);
  else if (key == "learning_rate") c.model.learning_rate = parse_real(value, key);
  else if (key == "seed") c.model.seed = parse_count(value, key);
  else if (key == "train_frac") c.train_frac = parse_real(value, key);
  else if (key == "eval_target") c.eval_target = parse_eval_target(value);
  else if (key == "acf_max_lag") c.acf_max_lag = parse_count(value, key);
  else fail(Errc::ConfigError, "unknown config key '" + key + "'");
}

/// INI-style `key = value` lines; '#' and ';' start comments, [sections] are ignored.
inline void load_config(std::istream& in, PipelineConfig& c) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = io::trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, Errc::ConfigError, "config line " + std::to_string(line_no) + ": missing '='");
    set_option(c, io::trim(line.substr(0, eq)), io::trim(line.substr(eq + 1)));
  }
}

inline void load_config_file(const std::string& path, PipelineConfig& c) {
  std::ifstream in(path);
  require(in.good(), Errc::ConfigError, "cannot open config " + path);
  load_config(in, c);
}

/// DEK_SEED, when set, overrides the seed.
inline void apply_environment(PipelineConfig& c) {
  if (const char* s = std::getenv("DEK_SEED"); s && *s) c.model.seed = detail::parse_count(s, "DEK_SEED");
}

inline json model_spec_json(const seq::ModelSpec& m) {
  return json{{"architecture", seq::to_string(m.architecture)},
              {"hidden_size", m.hidden_size},
              {"epochs", m.epochs},
              {"batch_size", m.batch_size},
              {"learning_rate", m.learning_rate},
              {"seed", m.seed},
              {"adam", {{"beta1", m.beta1}, {"beta2", m.beta2}, {"eps", m.eps}}},
              {"loss", "mse"}};
}

inline json config_json(const PipelineConfig& c) {
  json arch = json::array();
  for (auto a : c.architectures) arch.push_back(seq::to_string(a));
  return json{{"input", c.input},
              {"ground_truth", c.ground_truth},
              {"interval", c.interval},
              {"divide_by_interval", c.divide_by_interval},
              {"denoise", c.denoise},
              {"outliers", c.outliers},
              {"mitigation", outlier::to_string(c.mitigation)},
              {"k_range", {c.k_min, c.k_max}},
              {"knn_window", c.knn_window},
              {"p_range", {c.p_min, c.p_max}},
              {"q_range", {c.q_min, c.q_max}},
              {"d", c.d},
              {"lags", c.lags},
              {"train_frac", c.train_frac},
              {"eval_target", to_string(c.resolved_target())},
              {"model", model_spec_json(c.model)},
              {"architectures", arch}};
}

// ---------------------------------------------------------------------------
// Ground truth sidecar
// ---------------------------------------------------------------------------

struct GroundTruth {
  std::vector<double> clean;
  std::vector<std::size_t> spike_indices;
};

inline json ground_truth_json(const synth::SynthSpec& spec, const synth::SynthData& d) {
  return json{{"seed", spec.seed},
              {"n", spec.n},
              {"start_time", spec.start_time},
              {"interval", spec.interval},
              {"base_level", spec.base_level},
              {"daily_amplitude", spec.daily_amplitude},
              {"weekly_amplitude", spec.weekly_amplitude},
              {"noise_sigma", spec.noise_sigma},
              {"spike_magnitude", spec.spike_magnitude},
              {"spike_unit", d.spike_unit},
              {"spike_indices", d.spike_indices},
              {"clean", d.clean.values}};
}

inline GroundTruth read_ground_truth(const std::string& path) {
  GroundTruth g;
  try {
    const auto j = json::parse(io::read_text_file(path));
    g.clean = j.at("clean").get<std::vector<double>>();
    g.spike_indices = j.at("spike_indices").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    fail(Errc::MalformedInput, "ground truth " + path + ": " + e.what());
  }
  return g;
}

// ---------------------------------------------------------------------------
// Hashing and artifacts
// ---------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) == 1, Errc::IoError,
          "SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

/// Collects written files so a manifest can be produced at the end.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    require(!ec, Errc::IoError, "cannot create output directory " + root_.string());
  }

  const fs::path& root() const noexcept { return root_; }

  /// `rel` is relative to the root and uses '/' separators.
  void write(const std::string& rel, const std::string& content) {
    const fs::path p = root_ / rel;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    require(!ec, Errc::IoError, "cannot create " + p.parent_path().string());
    io::write_text_file(p.string(), content);
    files_[rel] = {sha256_hex(content), content.size()};
  }

  void write_json(const std::string& rel, const json& j) { write(rel, j.dump(2) + "\n"); }

  /// manifest.json lists every file written so far, sorted by path.
  std::string write_manifest() {
    json files = json::array();
    for (const auto& [path, info] : files_)
      files.push_back(json{{"path", path}, {"sha256", info.first}, {"bytes", info.second}});
    const std::string content = json{{"files", files}}.dump(2) + "\n";
    io::write_text_file((root_ / "manifest.json").string(), content);
    return content;
  }

 private:
  fs::path root_;
  std::map<std::string, std::pair<std::string, std::size_t>> files_;
};

namespace detail {

/// Prefixes the stage name onto any library error.
template <typename F>
auto stage(std::string_view name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw Error(e.code(), "stage '" + std::string(name) + "': " + msg);
  }
}

inline std::string csv_columns(const std::vector<std::string>& header, const std::vector<std::vector<double>>& cols) {
  std::ostringstream ss;
  io::write_columns(ss, header, cols);
  return ss.str();
}

inline std::string ranking_csv(std::span<const lagsel::RankedOrder> ranking) {
  std::ostringstream rk;
  rk << "rank,p,d,q,aic,converged,stationary,invertible\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const auto& r = ranking[i];
    rk << (i + 1) << ',' << r.order.p << ',' << r.order.d << ',' << r.order.q << ',' << io::fmt(r.aic) << ','
       << int{r.converged} << ',' << int{r.stationary} << ',' << int{r.invertible} << '\n';
  }
  return rk.str();
}

inline std::vector<double> timestamps(const TrafficSeries& s) {
  std::vector<double> t(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) t[i] = static_cast<double>(s.time_at(i));
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Preprocessing (shared by every architecture of a variant)
// ---------------------------------------------------------------------------

struct Prepared {
  TrafficSeries observed;
  std::vector<double> processed;
  std::optional<GroundTruth> truth;
  std::optional<emd::DenoiseResult> denoised;
  std::optional<outlier::OutlierReport> outliers;
  std::vector<lagsel::RankedOrder> ranking;
  std::size_t lags = 0;
  seq::WindowedDataset train;
  seq::WindowedDataset test;
  json summary;
};

using Logger = std::function<void(const std::string&)>;

inline TrafficSeries load_input(const PipelineConfig& c) {
  require(!c.input.empty(), Errc::ConfigError, "no input file given");
  io::ReadOptions ro;
  ro.interval = c.interval;
  ro.ingest.divide_by_interval = c.divide_by_interval;
  return io::read_series_file(c.input, ro);
}

/// Stages up to and including the train/test split; writes the stage artifacts.
inline Prepared prepare(const PipelineConfig& c, const TrafficSeries& raw, ArtifactWriter& out,
                        const std::string& prefix = "", const Logger& log = {}) {
  c.validate();
  auto note = [&](const std::string& m) {
    if (log) log(m);
  };
  Prepared P;
  P.summary = json::object();

  P.observed = detail::stage("forward_fill", [&] { return forward_fill(raw); });
  const auto ts = detail::timestamps(P.observed);
  P.summary["samples"] = P.observed.size();
  P.summary["filled_gaps"] = std::count(raw.missing.begin(), raw.missing.end(), true);

  if (!c.ground_truth.empty()) {
    P.truth = detail::stage("ground_truth", [&] { return read_ground_truth(c.ground_truth); });
    require(P.truth->clean.size() == P.observed.size(), Errc::MalformedInput,
            "ground truth has " + std::to_string(P.truth->clean.size()) + " values, series has " +
                std::to_string(P.observed.size()));
  }

  P.processed = P.observed.values;
  if (c.denoise) {
    note("denoise: empirical mode decomposition");
    P.denoised = detail::stage("denoise", [&] { return emd::denoise(P.processed); });
    P.processed = P.denoised->denoised;
    out.write(prefix + "denoised.csv", detail::csv_columns({"timestamp", "original", "avg_imf", "denoised"},
                                                  {ts, P.observed.values, P.denoised->noise, P.processed}));
    json dj{{"imf_count", P.denoised->imf_count}, {"not_decomposable", P.denoised->not_decomposable}};
    if (!P.denoised->warning.empty()) dj["warning"] = P.denoised->warning;
    if (P.truth) {
      dj["snr_db_observed"] = emd::snr_db(P.truth->clean, P.observed.values);
      dj["snr_db_denoised"] = emd::snr_db(P.truth->clean, P.processed);
    }
    P.summary["denoise"] = dj;
  }

  if (c.outliers) {
    note("outliers: three-sigma detection and K search");
    outlier::OutlierConfig oc{c.k_min, c.k_max, c.knn_window, c.mitigation};
    P.outliers = detail::stage("outliers", [&] { return outlier::run(P.processed, oc); });
    const auto& rep = *P.outliers;
    json flagged = json::array();
    for (auto i : rep.flagged)
      flagged.push_back(json{{"index", i}, {"timestamp", P.observed.time_at(i)}, {"value", P.processed[i]},
                             {"replacement", rep.mitigated[i]}});
    json k_rmse = json::array();
    for (const auto& [k, r] : rep.k_rmse) k_rmse.push_back(json{{"k", k}, {"rmse", r}});
    json oj{{"mean", rep.bounds.mean},   {"std_dev", rep.bounds.std_dev}, {"upper", rep.bounds.upper},
            {"lower", rep.bounds.lower}, {"best_k", rep.best_k},          {"window", rep.window},
            {"mode", outlier::to_string(rep.mode)}, {"flagged_count", rep.flagged.size()},
            {"k_rmse", k_rmse},          {"flagged", flagged}};
    if (P.truth) {
      const std::set<std::size_t> truth(P.truth->spike_indices.begin(), P.truth->spike_indices.end());
      std::size_t hit = 0;
      for (auto i : rep.flagged) hit += truth.count(i);
      oj["precision"] = rep.flagged.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(rep.flagged.size());
      oj["recall"] = truth.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(truth.size());
    }
    out.write_json(prefix + "outliers.json", oj);
    std::vector<double> flag_col(P.processed.size(), 0.0);
    for (auto i : rep.flagged) flag_col[i] = 1.0;
    out.write(prefix + "mitigated.csv", detail::csv_columns({"timestamp", "input", "flagged", "mitigated"},
                                                   {ts, P.processed, flag_col, rep.mitigated}));
    P.processed = rep.mitigated;
    P.summary["outliers"] = json{{"flagged", rep.flagged.size()}, {"best_k", rep.best_k}};
  }

  const std::size_t max_lag = std::min(c.acf_max_lag, P.processed.size() - 1);
  if (max_lag >= 1) {
    try {
      const auto r = acf(P.processed, max_lag);
      std::vector<double> lag(r.size());
      for (std::size_t k = 0; k < r.size(); ++k) lag[k] = static_cast<double>(k);
      out.write(prefix + "acf.csv", detail::csv_columns({"lag", "correlation"}, {lag, r}));
    } catch (const Error& e) {
      note(std::string("acf skipped: ") + e.what());
    }
  }

  // Lag selection sees only the chronological training share of the series.
  if (c.lags > 0) {
    P.lags = c.lags;
  } else {
    note("select-lags: ARIMA grid");
    const auto n_train = static_cast<std::size_t>(std::floor(c.train_frac * static_cast<double>(P.processed.size())));
    const std::span<const double> head(P.processed.data(), n_train);
    lagsel::GridConfig gc;
    gc.p_min = c.p_min;
    gc.p_max = c.p_max;
    gc.q_min = c.q_min;
    gc.q_max = c.q_max;
    gc.d = c.d;
    P.ranking = detail::stage("select_lags", [&] { return lagsel::grid_search(head, gc); });
    P.lags = detail::stage("select_lags", [&] { return lagsel::select_lag_count(P.ranking); });
    out.write(prefix + "lag_ranking.csv", detail::ranking_csv(P.ranking));
    P.summary["best_order"] = lagsel::to_string(P.ranking.front().order);
  }
  P.summary["lags"] = P.lags;

  std::tie(P.train, P.test) = detail::stage("window", [&] {
    const auto ds = seq::make_windows(P.processed, P.lags);
    return seq::split(ds, c.train_frac);
  });
  P.summary["train_samples"] = P.train.samples();
  P.summary["test_samples"] = P.test.samples();
  return P;
}

// ---------------------------------------------------------------------------
// Model fitting and evaluation
// ---------------------------------------------------------------------------

struct ModelRun {
  seq::FittedModel model;
  std::vector<double> actual;
  std::vector<double> predicted;
  eval::MetricReport metrics;
};

inline std::vector<double> eval_targets(const PipelineConfig& c, const Prepared& P, const seq::WindowedDataset& ds) {
  std::vector<double> y(ds.samples());
  const auto target = c.resolved_target();
  require(target != EvalTarget::Clean || P.truth, Errc::ConfigError, "eval_target=clean needs ground_truth");
  for (std::size_t i = 0; i < ds.samples(); ++i) {
    const auto t = ds.target_index[i];
    y[i] = target == EvalTarget::Clean ? P.truth->clean[t]
           : target == EvalTarget::Processed ? P.processed[t]
                                             : P.observed.values[t];
  }
  return y;
}

/// Trains one architecture on a prepared variant and writes its artifacts under `prefix`.
inline ModelRun fit_and_evaluate(const PipelineConfig& c, const Prepared& P, const seq::ModelSpec& spec,
                                 ArtifactWriter& out, const std::string& prefix, const Logger& log = {}) {
  ModelRun run;
  run.model = detail::stage("train", [&] {
    return seq::train(P.train, spec, [&](std::size_t epoch, double loss) {
      if (log && (epoch == 1 || epoch % 10 == 0 || epoch == spec.epochs))
        log("  " + std::string(seq::to_string(spec.architecture)) + " epoch " + std::to_string(epoch) +
            " loss " + io::fmt(loss));
    });
  });
  run.predicted = detail::stage("predict", [&] { return seq::predict(run.model, P.test); });
  run.actual = eval_targets(c, P, P.test);
  run.metrics = detail::stage("metrics", [&] { return eval::evaluate(run.actual, run.predicted); });

  std::vector<double> t(P.test.samples());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(P.observed.time_at(P.test.target_index[i]));
  out.write(prefix + "predictions.csv", detail::csv_columns({"t", "actual", "predicted"}, {t, run.actual, run.predicted}));
  std::ostringstream ck;
  seq::save_checkpoint(ck, run.model);
  out.write(prefix + "model.tckp", ck.str());

  const auto& m = run.metrics;
  out.write_json(prefix + "run_report.json",
                 json{{"model", model_spec_json(spec)},
                      {"lags", P.lags},
                      {"eval_target", to_string(c.resolved_target())},
                      {"epochs_run", run.model.epoch_loss.size()},
                      {"first_train_loss", run.model.epoch_loss.front()},
                      {"final_train_loss", run.model.epoch_loss.back()},
                      {"loss_history", run.model.epoch_loss},
                      {"test", {{"rmse_bps", m.rmse}, {"mae_bps", m.mae}, {"mape_pct", m.mape},
                                {"accuracy_pct", m.accuracy}, {"n", m.n}}},
                      {"preprocessing", P.summary}});
  return run;
}

struct RunArtifacts {
  fs::path output_dir;
  std::size_t lags = 0;
  eval::MetricReport metrics;
  std::string manifest;
};

/// Full single-model run in stage order; artifacts land in c.output_dir.
inline RunArtifacts run_pipeline(const PipelineConfig& c, const Logger& log = {}) {
  c.validate();
  ArtifactWriter out(c.output_dir);
  const auto raw = detail::stage("ingest", [&] { return load_input(c); });
  RunArtifacts res;
  res.output_dir = out.root();
  try {
    out.write_json("config.json", config_json(c));
    const auto P = prepare(c, raw, out, "", log);
    res.lags = P.lags;
    res.metrics = fit_and_evaluate(c, P, c.model, out, "", log).metrics;
  } catch (...) {
    out.write_manifest();
    throw;
  }
  res.manifest = out.write_manifest();
  return res;
}

// ---------------------------------------------------------------------------
// Variant comparison
// ---------------------------------------------------------------------------

struct Variant {
  std::string name;
  bool denoise;
  bool outliers;
};

inline const std::vector<Variant>& variants() {
  static const std::vector<Variant> v{{"baseline", false, false}, {"knn", false, true}, {"knn_emd", true, true}};
  return v;
}

struct ComparisonRow {
  seq::Architecture architecture;
  std::string variant;
  eval::MetricReport metrics;
  std::size_t lags = 0;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::string manifest;

  const ComparisonRow* find(seq::Architecture a, std::string_view variant) const {
    for (const auto& r : rows)
      if (r.architecture == a && r.variant == variant) return &r;
    return nullptr;
  }
};

/// comparison.csv: one row per (model, variant) with MAPE reductions against
/// the same model's baseline and against the RNN baseline.
inline std::string comparison_csv(const Comparison& cmp) {
  std::ostringstream ss;
  ss << "model,variant,rmse,mae,mape,accuracy,reduction_vs_baseline_pct,reduction_vs_rnn_baseline_pct\n";
  const auto* rnn = cmp.find(seq::Architecture::Rnn, "baseline");
  for (const auto& r : cmp.rows) {
    const auto* base = cmp.find(r.architecture, "baseline");
    ss << seq::to_string(r.architecture) << ',' << r.variant << ',' << io::fmt(r.metrics.rmse) << ','
       << io::fmt(r.metrics.mae) << ',' << io::fmt(r.metrics.mape) << ',' << io::fmt(r.metrics.accuracy) << ',';
    if (base && base->metrics.mape > 0.0) ss << io::fmt(eval::error_reduction(base->metrics.mape, r.metrics.mape));
    ss << ',';
    if (rnn && rnn->metrics.mape > 0.0) ss << io::fmt(eval::error_reduction(rnn->metrics.mape, r.metrics.mape));
    ss << '\n';
  }
  return ss.str();
}

/// baseline, knn and knn_emd preprocessing, each feeding every selected
/// architecture with the same seed and split. Per-run files go to
/// <output>/<variant>/<model>/.
inline Comparison compare_variants(const PipelineConfig& c, const Logger& log = {}) {
  c.validate();
  ArtifactWriter out(c.output_dir);
  const auto raw = detail::stage("ingest", [&] { return load_input(c); });
  Comparison cmp;
  try {
    out.write_json("config.json", config_json(c));
    for (const auto& v : variants()) {
      if (log) log("variant " + v.name);
      PipelineConfig vc = c;
      vc.denoise = v.denoise;
      vc.outliers = v.outliers;
      const auto P = prepare(vc, raw, out, v.name + "/", log);
      for (auto arch : c.architectures) {
        seq::ModelSpec spec = c.model;
        spec.architecture = arch;
        const std::string prefix = v.name + "/" + std::string(seq::to_string(arch)) + "/";
        auto run = fit_and_evaluate(vc, P, spec, out, prefix, log);
        if (log) log("  " + std::string(seq::to_string(arch)) + " mape " + io::fmt(run.metrics.mape));
        cmp.rows.push_back({arch, v.name, run.metrics, P.lags});
      }
      out.write_json(v.name + "/summary.json", P.summary);
    }
    out.write("comparison.csv", comparison_csv(cmp));
  } catch (...) {
    out.write_manifest();
    throw;
  }
  cmp.manifest = out.write_manifest();
  return cmp;
}

}  // namespace tcast::pipeline
