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

// tcast command-line front end.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 training
// divergence.

#include <tcast/emd.hpp>
#include <tcast/eval.hpp>
#include <tcast/io.hpp>
#include <tcast/lagsel.hpp>
#include <tcast/outlier.hpp>
#include <tcast/pipeline.hpp>
#include <tcast/seqmodels.hpp>
#include <tcast/series.hpp>
#include <tcast/synth.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace tcast;
namespace pl = tcast::pipeline;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDiverged = 4;

void log_line(const std::string& m) { std::cerr << m << '\n'; }

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& cols) {
  std::ostringstream ss;
  io::write_columns(ss, header, cols);
  return ss.str();
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    io::write_text_file(path, content);
}

struct InputFlags {
  std::string input;
  std::int64_t interval = 0;
  bool no_divide = false;

  void add(CLI::App* app) {
    app->add_option("-i,--input", input, "Input CSV: 'timestamp,counter' or 'timestamp,bps'")->required();
    app->add_option("--interval", interval, "Sampling interval in seconds (default: inferred)");
    app->add_flag("--no-interval-divide", no_divide, "Report bits per interval instead of bits per second");
  }

  /// Ingested and forward-filled.
  TrafficSeries load() const {
    io::ReadOptions ro;
    ro.interval = interval;
    ro.ingest.divide_by_interval = !no_divide;
    return forward_fill(io::read_series_file(input, ro));
  }
};

// Pipeline options shared by `pipeline` and `compare`. Each is recorded as a
// config key override and applied after the config file.
struct PipelineFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  bool no_denoise = false;
  bool no_outliers = false;
  bool no_divide = false;

  void add(CLI::App* app) {
    app->add_option("-c,--config", config_path, "INI-style config file (key = value)");
    auto opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
      app->add_option_function<std::string>(flag, [this, key](const std::string& v) { overrides[key] = v; }, help);
    };
    opt("-i,--input", "input", "Input CSV");
    opt("--ground-truth", "ground_truth", "Synth ground-truth JSON (enables clean-signal scoring)");
    opt("-o,--output-dir", "output_dir", "Output directory");
    opt("--interval", "interval", "Sampling interval in seconds");
    opt("--denoise", "denoise", "Denoising stage on/off");
    opt("--outliers", "outliers", "Outlier stage on/off");
    opt("--mitigation", "mitigation", "neighbor | preceding");
    opt("--k-range", "k_range", "K search range, e.g. 2:24");
    opt("--knn-window", "knn_window", "Lagged-window length for KNN");
    opt("--p-range", "p_range", "ARIMA p range, e.g. 2:24");
    opt("--q-range", "q_range", "ARIMA q range, e.g. 2:24");
    opt("--d", "d", "ARIMA differencing order");
    opt("--lags", "lags", "Fixed lag count (skips the ARIMA grid)");
    opt("--architecture", "architecture", "RNN | LSTM | GRU | LSTM_Seq2Seq | LSTM_Seq2Seq_ATN");
    opt("--architectures", "architectures", "Comma-separated list for compare, or 'all'");
    opt("--hidden-size", "hidden_size", "Hidden units");
    opt("--epochs", "epochs", "Training epochs");
    opt("--batch-size", "batch_size", "Minibatch size");
    opt("--learning-rate", "learning_rate", "Adam learning rate");
    opt("--seed", "seed", "Random seed (DEK_SEED overrides)");
    opt("--train-frac", "train_frac", "Chronological training share");
    opt("--eval-target", "eval_target", "observed | processed | clean");
    opt("--acf-max-lag", "acf_max_lag", "Largest lag in acf.csv");
    app->add_flag("--no-denoise", no_denoise, "Disable denoising");
    app->add_flag("--no-outliers", no_outliers, "Disable outlier handling");
    app->add_flag("--no-interval-divide", no_divide, "Report bits per interval instead of bits per second");
  }

  pl::PipelineConfig resolve() const {
    pl::PipelineConfig c;
    if (!config_path.empty()) pl::load_config_file(config_path, c);
    for (const auto& [k, v] : overrides) pl::set_option(c, k, v);
    if (no_denoise) c.denoise = false;
    if (no_outliers) c.outliers = false;
    if (no_divide) c.divide_by_interval = false;
    pl::apply_environment(c);
    c.validate();
    return c;
  }
};

struct ModelFlags {
  std::string architecture = "LSTM";
  seq::ModelSpec spec;

  void add(CLI::App* app) {
    app->add_option("-m,--architecture", architecture, "RNN | LSTM | GRU | LSTM_Seq2Seq | LSTM_Seq2Seq_ATN")
        ->capture_default_str();
    app->add_option("--hidden-size", spec.hidden_size, "Hidden units")->capture_default_str();
    app->add_option("--epochs", spec.epochs, "Training epochs")->capture_default_str();
    app->add_option("--batch-size", spec.batch_size, "Minibatch size")->capture_default_str();
    app->add_option("--learning-rate", spec.learning_rate, "Adam learning rate")->capture_default_str();
    app->add_option("--seed", spec.seed, "Random seed (DEK_SEED overrides)")->capture_default_str();
  }

  seq::ModelSpec resolve() const {
    seq::ModelSpec s = spec;
    s.architecture = seq::parse_architecture(architecture);
    pl::PipelineConfig tmp;
    tmp.model = s;
    pl::apply_environment(tmp);
    s = tmp.model;
    s.validate();
    return s;
  }
};

std::pair<std::size_t, std::size_t> range_arg(const std::string& v, const char* name) {
  return pl::detail::parse_range(v, name);
}

int run(int argc, char** argv) {
  CLI::App app{"tcast: traffic denoising, outlier handling and recurrent forecasting"};
  app.require_subcommand(1);

  // synth ------------------------------------------------------------------
  synth::SynthSpec ss;
  std::string synth_out, synth_truth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic traffic series");
  synth_cmd->add_option("-o,--output", synth_out, "Series CSV (timestamp,bps)")->required();
  synth_cmd->add_option("--truth", synth_truth, "Ground-truth JSON sidecar (clean values, spike indices)");
  synth_cmd->add_option("-n,--samples", ss.n, "Sample count")->capture_default_str();
  synth_cmd->add_option("--interval", ss.interval, "Interval in seconds")->capture_default_str();
  synth_cmd->add_option("--start", ss.start_time, "First timestamp")->capture_default_str();
  synth_cmd->add_option("--base", ss.base_level, "Base level (bps)")->capture_default_str();
  synth_cmd->add_option("--daily-amplitude", ss.daily_amplitude, "Daily amplitude (bps)")->capture_default_str();
  synth_cmd->add_option("--weekly-amplitude", ss.weekly_amplitude, "Weekly amplitude (bps)")->capture_default_str();
  synth_cmd->add_option("--noise-sigma", ss.noise_sigma, "Gaussian noise sd (bps)")->capture_default_str();
  synth_cmd->add_option("--spike-count", ss.spike_count, "Number of spikes")->capture_default_str();
  synth_cmd->add_option("--spike-magnitude", ss.spike_magnitude, "Spike height in series sd")->capture_default_str();
  synth_cmd->add_option("--seed", ss.seed, "Random seed (DEK_SEED overrides)")->capture_default_str();

  // ingest -----------------------------------------------------------------
  InputFlags ingest_in;
  std::string ingest_out;
  bool ingest_keep_gaps = false;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert counters to bps and forward-fill gaps");
  ingest_in.add(ingest_cmd);
  ingest_cmd->add_option("-o,--output", ingest_out, "Output CSV (default: stdout)");
  ingest_cmd->add_flag("--keep-gaps", ingest_keep_gaps, "Write missing values as NaN instead of filling");

  // decompose --------------------------------------------------------------
  InputFlags dec_in;
  std::string dec_out;
  emd::SiftConfig sift;
  auto* dec_cmd = app.add_subcommand("decompose", "Empirical mode decomposition and avgIMF denoising");
  dec_in.add(dec_cmd);
  dec_cmd->add_option("-o,--output", dec_out, "Output CSV (default: stdout)");
  dec_cmd->add_option("--sd-threshold", sift.sd_threshold, "Sifting SD stop threshold")->capture_default_str();
  dec_cmd->add_option("--max-sift", sift.max_sift_iterations, "Sifting iteration cap")->capture_default_str();
  dec_cmd->add_option("--max-imfs", sift.max_imfs, "IMF cap (0 = log2(n) - 1)")->capture_default_str();

  // outliers ---------------------------------------------------------------
  InputFlags out_in;
  std::string out_report, out_csv, out_k_range = "2:24", out_mode = "neighbor";
  std::size_t out_window = 13;
  auto* out_cmd = app.add_subcommand("outliers", "Three-sigma detection, K search and KNN replacement");
  out_in.add(out_cmd);
  out_cmd->add_option("--report", out_report, "Outlier report JSON (default: stdout)");
  out_cmd->add_option("-o,--output", out_csv, "Mitigated series CSV");
  out_cmd->add_option("--k-range", out_k_range, "K search range")->capture_default_str();
  out_cmd->add_option("--window", out_window, "Lagged-window length")->capture_default_str();
  out_cmd->add_option("--mode", out_mode, "neighbor | preceding")->capture_default_str();

  // select-lags ------------------------------------------------------------
  InputFlags lag_in;
  std::string lag_out, lag_p = "2:24", lag_q = "2:24";
  std::size_t lag_d = 1;
  double lag_frac = 0.70;
  auto* lag_cmd = app.add_subcommand("select-lags", "ARIMA grid ranked by AIC; prints the selected lag count");
  lag_in.add(lag_cmd);
  lag_cmd->add_option("-o,--output", lag_out, "Ranking CSV");
  lag_cmd->add_option("--p-range", lag_p, "p range")->capture_default_str();
  lag_cmd->add_option("--q-range", lag_q, "q range")->capture_default_str();
  lag_cmd->add_option("--d", lag_d, "Differencing order")->capture_default_str();
  lag_cmd->add_option("--train-frac", lag_frac, "Leading share of the series to fit on")->capture_default_str();

  // train ------------------------------------------------------------------
  InputFlags train_in;
  ModelFlags train_model;
  std::string train_ckpt, train_report;
  std::size_t train_lags = 13;
  double train_frac = 0.70;
  auto* train_cmd = app.add_subcommand("train", "Train one forecaster on the training split");
  train_in.add(train_cmd);
  train_model.add(train_cmd);
  train_cmd->add_option("--lags", train_lags, "Lag count")->capture_default_str();
  train_cmd->add_option("--train-frac", train_frac, "Chronological training share")->capture_default_str();
  train_cmd->add_option("--checkpoint", train_ckpt, "Checkpoint output path")->required();
  train_cmd->add_option("--report", train_report, "Training report JSON");

  // evaluate ---------------------------------------------------------------
  InputFlags ev_in;
  std::string ev_ckpt, ev_pred, ev_truth;
  double ev_frac = 0.70;
  auto* ev_cmd = app.add_subcommand("evaluate", "Score a checkpoint on the test split");
  ev_in.add(ev_cmd);
  ev_cmd->add_option("--checkpoint", ev_ckpt, "Checkpoint path")->required();
  ev_cmd->add_option("--train-frac", ev_frac, "Chronological training share")->capture_default_str();
  ev_cmd->add_option("--predictions", ev_pred, "Predictions CSV (t,actual,predicted)");
  ev_cmd->add_option("--ground-truth", ev_truth, "Score against the clean signal in this synth sidecar");

  // pipeline / compare -----------------------------------------------------
  PipelineFlags pipe_flags, cmp_flags;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage for one architecture");
  pipe_flags.add(pipe_cmd);
  auto* cmp_cmd = app.add_subcommand("compare", "baseline / knn / knn_emd across architectures");
  cmp_flags.add(cmp_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*synth_cmd) {
    pl::PipelineConfig tmp;
    tmp.model.seed = ss.seed;
    pl::apply_environment(tmp);
    ss.seed = tmp.model.seed;
    const auto d = synth::generate(ss);
    std::ostringstream csv;
    io::write_series(csv, d.noisy);
    emit(synth_out, csv.str());
    if (!synth_truth.empty()) io::write_text_file(synth_truth, pl::ground_truth_json(ss, d).dump(2) + "\n");
    return kExitOk;
  }

  if (*ingest_cmd) {
    io::ReadOptions ro;
    ro.interval = ingest_in.interval;
    ro.ingest.divide_by_interval = !ingest_in.no_divide;
    auto s = io::read_series_file(ingest_in.input, ro);
    if (!ingest_keep_gaps) s = forward_fill(s);
    std::ostringstream csv;
    io::write_series(csv, s);
    emit(ingest_out, csv.str());
    return kExitOk;
  }

  if (*dec_cmd) {
    const auto s = dec_in.load();
    const auto r = emd::decompose(s.values, sift);
    std::vector<std::string> header{"t", "original"};
    std::vector<std::vector<double>> cols;
    std::vector<double> t(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) t[i] = static_cast<double>(s.time_at(i));
    cols.push_back(t);
    cols.push_back(s.values);
    for (std::size_t k = 0; k < r.imfs.size(); ++k) {
      header.push_back("imf_" + std::to_string(k + 1));
      cols.push_back(r.imfs[k]);
    }
    std::vector<double> den(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) den[i] = s.values[i] - r.avg_imf[i];
    header.insert(header.end(), {"residue", "avg_imf", "denoised"});
    cols.insert(cols.end(), {r.residue, r.avg_imf, den});
    emit(dec_out, to_csv(header, cols));
    log_line("imfs: " + std::to_string(r.imfs.size()));
    return kExitOk;
  }

  if (*out_cmd) {
    const auto s = out_in.load();
    const auto [kmin, kmax] = range_arg(out_k_range, "k-range");
    const auto rep = outlier::run(s.values, {kmin, kmax, out_window, pl::parse_mitigation(out_mode)});
    pl::json flagged = pl::json::array();
    for (auto i : rep.flagged)
      flagged.push_back({{"index", i}, {"timestamp", s.time_at(i)}, {"value", s.values[i]},
                         {"replacement", rep.mitigated[i]}});
    pl::json k_rmse = pl::json::array();
    for (const auto& [k, r] : rep.k_rmse) k_rmse.push_back({{"k", k}, {"rmse", r}});
    const pl::json j{{"mean", rep.bounds.mean},   {"std_dev", rep.bounds.std_dev}, {"upper", rep.bounds.upper},
                     {"lower", rep.bounds.lower}, {"best_k", rep.best_k},          {"window", rep.window},
                     {"mode", outlier::to_string(rep.mode)}, {"flagged_count", rep.flagged.size()},
                     {"k_rmse", k_rmse},          {"flagged", flagged}};
    emit(out_report, j.dump(2) + "\n");
    if (!out_csv.empty()) {
      std::ostringstream csv;
      io::write_series(csv, s.with_values(rep.mitigated));
      io::write_text_file(out_csv, csv.str());
    }
    return kExitOk;
  }

  if (*lag_cmd) {
    const auto s = lag_in.load();
    lagsel::GridConfig gc;
    std::tie(gc.p_min, gc.p_max) = range_arg(lag_p, "p-range");
    std::tie(gc.q_min, gc.q_max) = range_arg(lag_q, "q-range");
    gc.d = lag_d;
    require(lag_frac > 0.0 && lag_frac <= 1.0, Errc::ConfigError, "train-frac must lie in (0, 1]");
    const auto n = static_cast<std::size_t>(std::floor(lag_frac * static_cast<double>(s.size())));
    const auto ranking = lagsel::grid_search(std::span<const double>(s.values.data(), n), gc);
    if (!lag_out.empty()) io::write_text_file(lag_out, pl::detail::ranking_csv(ranking));
    const auto p = lagsel::select_lag_count(ranking);
    std::cout << "best order " << lagsel::to_string(ranking.front().order) << " aic " << io::fmt(ranking.front().aic)
              << "\nlags " << p << '\n';
    return kExitOk;
  }

  if (*train_cmd) {
    const auto s = train_in.load();
    const auto spec = train_model.resolve();
    const auto [tr, te] = seq::split(seq::make_windows(s.values, train_lags), train_frac);
    const auto model = seq::train(tr, spec, [&](std::size_t e, double loss) {
      if (e == 1 || e % 10 == 0 || e == spec.epochs) log_line("epoch " + std::to_string(e) + " loss " + io::fmt(loss));
    });
    seq::save_checkpoint_file(train_ckpt, model);
    if (!train_report.empty()) {
      const pl::json j{{"model", pl::model_spec_json(spec)},
                       {"lags", train_lags},
                       {"train_samples", tr.samples()},
                       {"final_train_loss", model.epoch_loss.back()},
                       {"loss_history", model.epoch_loss}};
      io::write_text_file(train_report, j.dump(2) + "\n");
    }
    return kExitOk;
  }

  if (*ev_cmd) {
    const auto s = ev_in.load();
    const auto model = seq::load_checkpoint_file(ev_ckpt);
    const auto [tr, te] = seq::split(seq::make_windows(s.values, model.lags), ev_frac);
    const auto pred = seq::predict(model, te);
    std::vector<double> actual = te.targets;
    if (!ev_truth.empty()) {
      const auto g = pl::read_ground_truth(ev_truth);
      require(g.clean.size() == s.size(), Errc::MalformedInput, "ground truth length differs from the series");
      for (std::size_t i = 0; i < te.samples(); ++i) actual[i] = g.clean[te.target_index[i]];
    }
    const auto m = eval::evaluate(actual, pred);
    if (!ev_pred.empty()) {
      std::vector<double> t(te.samples());
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(s.time_at(te.target_index[i]));
      io::write_text_file(ev_pred, to_csv({"t", "actual", "predicted"}, {t, actual, pred}));
    }
    const pl::json j{{"model", seq::to_string(model.spec.architecture)},
                     {"lags", model.lags},
                     {"rmse_bps", m.rmse},
                     {"mae_bps", m.mae},
                     {"mape_pct", m.mape},
                     {"accuracy_pct", m.accuracy},
                     {"n", m.n}};
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }

  if (*pipe_cmd) {
    const auto cfg = pipe_flags.resolve();
    const auto res = pl::run_pipeline(cfg, log_line);
    std::cout << "lags " << res.lags << "\nrmse_bps " << io::fmt(res.metrics.rmse) << "\nmae_bps "
              << io::fmt(res.metrics.mae) << "\nmape_pct " << io::fmt(res.metrics.mape) << "\naccuracy_pct "
              << io::fmt(res.metrics.accuracy) << "\noutput " << res.output_dir.string() << '\n';
    return kExitOk;
  }

  if (*cmp_cmd) {
    const auto cfg = cmp_flags.resolve();
    const auto cmp = pl::compare_variants(cfg, log_line);
    std::cout << pl::comparison_csv(cmp);
    return kExitOk;
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tcast::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case tcast::Errc::ConfigError: return kExitConfig;
      case tcast::Errc::TrainingDiverged: return kExitDiverged;
      default: return kExitData;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
