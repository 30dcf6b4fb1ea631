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

#include <tcast/pipeline.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace tcast;
namespace fs = std::filesystem;

namespace {

template <typename F>
void expect_errc(Errc code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tcast_test_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

/// Writes a short synthetic corpus plus ground truth; returns a ready config.
pipeline::PipelineConfig small_config(const fs::path& dir) {
  synth::SynthSpec s;
  s.n = 600;
  s.spike_count = 6;
  const auto d = synth::generate(s);
  std::ostringstream csv;
  io::write_series(csv, d.noisy);
  io::write_text_file((dir / "in.csv").string(), csv.str());
  io::write_text_file((dir / "truth.json").string(), pipeline::ground_truth_json(s, d).dump());
  pipeline::PipelineConfig c;
  c.input = (dir / "in.csv").string();
  c.ground_truth = (dir / "truth.json").string();
  c.output_dir = (dir / "out").string();
  c.lags = 6;
  c.model.hidden_size = 6;
  c.model.epochs = 3;
  c.model.architecture = seq::Architecture::Gru;
  return c;
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
  std::istringstream in(
      "# comment\n[model]\narchitecture = lstm_seq2seq_atn\nepochs=7 ; trailing\n"
      "k_range = 3:9\np_range=1:4\ndenoise = off\nmitigation = preceding\narchitectures = rnn, gru\n"
      "eval_target = processed\n");
  pipeline::PipelineConfig c;
  pipeline::load_config(in, c);
  EXPECT_EQ(c.model.architecture, seq::Architecture::LstmSeq2SeqAttention);
  EXPECT_EQ(c.model.epochs, 7u);
  EXPECT_EQ(c.k_min, 3u);
  EXPECT_EQ(c.k_max, 9u);
  EXPECT_EQ(c.p_min, 1u);
  EXPECT_EQ(c.p_max, 4u);
  EXPECT_FALSE(c.denoise);
  EXPECT_EQ(c.mitigation, outlier::MitigationMode::Preceding);
  ASSERT_EQ(c.architectures.size(), 2u);
  EXPECT_EQ(c.architectures[1], seq::Architecture::Gru);
  EXPECT_EQ(c.resolved_target(), pipeline::EvalTarget::Processed);
}

TEST(Config, Rejections) {
  pipeline::PipelineConfig c;
  expect_errc(Errc::ConfigError, [&] { pipeline::set_option(c, "hidden_sise", "8"); });
  expect_errc(Errc::ConfigError, [&] { pipeline::set_option(c, "epochs", "-1"); });
  expect_errc(Errc::ConfigError, [&] { pipeline::set_option(c, "denoise", "maybe"); });
  expect_errc(Errc::ConfigError, [&] { pipeline::set_option(c, "k_range", "5"); });
  c.train_frac = 1.0;
  expect_errc(Errc::ConfigError, [&] { c.validate(); });
}

TEST(Config, DefaultTargetFollowsGroundTruth) {
  pipeline::PipelineConfig c;
  EXPECT_EQ(c.resolved_target(), pipeline::EvalTarget::Observed);
  c.ground_truth = "g.json";
  EXPECT_EQ(c.resolved_target(), pipeline::EvalTarget::Clean);
}

TEST(Config, SeedFromEnvironment) {
  pipeline::PipelineConfig c;
  ::setenv("DEK_SEED", "1234", 1);
  pipeline::apply_environment(c);
  ::unsetenv("DEK_SEED");
  EXPECT_EQ(c.model.seed, 1234u);
  ::setenv("DEK_SEED", "abc", 1);
  expect_errc(Errc::ConfigError, [&] { pipeline::apply_environment(c); });
  ::unsetenv("DEK_SEED");
}

TEST(Artifacts, Sha256KnownVectors) {
  EXPECT_EQ(pipeline::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(pipeline::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Pipeline, RunWritesArtifactsDeterministically) {
  const auto dir = scratch("run");
  auto c = small_config(dir);
  const auto a = pipeline::run_pipeline(c);
  EXPECT_EQ(a.lags, 6u);
  EXPECT_TRUE(std::isfinite(a.metrics.mape));
  for (const char* f : {"config.json", "denoised.csv", "outliers.json", "mitigated.csv", "acf.csv", "predictions.csv",
                        "model.tckp", "run_report.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  EXPECT_FALSE(fs::exists(dir / "out" / "lag_ranking.csv"));

  const auto model = seq::load_checkpoint_file((dir / "out" / "model.tckp").string());
  EXPECT_EQ(model.lags, 6u);
  const auto outl = nlohmann::json::parse(io::read_text_file((dir / "out" / "outliers.json").string()));
  EXPECT_TRUE(outl.contains("best_k"));

  const auto b = pipeline::run_pipeline(c);
  EXPECT_EQ(a.manifest, b.manifest);
  fs::remove_all(dir);
}

TEST(Pipeline, LagGridRunsOnTrainingShare) {
  const auto dir = scratch("grid");
  auto c = small_config(dir);
  c.lags = 0;
  c.p_min = 1, c.p_max = 3, c.q_min = 0, c.q_max = 1;
  c.outliers = false;
  c.denoise = false;
  const auto r = pipeline::run_pipeline(c);
  EXPECT_GE(r.lags, 1u);
  EXPECT_LE(r.lags, 3u);
  const auto ranking = io::read_text_file((dir / "out" / "lag_ranking.csv").string());
  EXPECT_EQ(std::count(ranking.begin(), ranking.end(), '\n'), 1 + 3 * 2);
  fs::remove_all(dir);
}

TEST(Pipeline, CompareProducesThreeVariants) {
  const auto dir = scratch("compare");
  auto c = small_config(dir);
  c.architectures = {seq::Architecture::Rnn};
  const auto cmp = pipeline::compare_variants(c);
  ASSERT_EQ(cmp.rows.size(), 3u);
  for (const char* v : {"baseline", "knn", "knn_emd"}) {
    ASSERT_NE(cmp.find(seq::Architecture::Rnn, v), nullptr) << v;
    EXPECT_TRUE(fs::exists(dir / "out" / v / "RNN" / "predictions.csv")) << v;
  }
  const auto csv = io::read_text_file((dir / "out" / "comparison.csv").string());
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.rfind("model,variant,rmse,mae,mape,accuracy,", 0), 0u);
  fs::remove_all(dir);
}

TEST(Pipeline, StageErrorsNameTheStage) {
  const auto dir = scratch("stage");
  auto c = small_config(dir);
  c.input = (dir / "absent.csv").string();
  try {
    pipeline::run_pipeline(c);
    ADD_FAILURE() << "expected failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoError);
    EXPECT_NE(std::string(e.what()).find("stage 'ingest'"), std::string::npos) << e.what();
  }
  c = small_config(dir);
  c.lags = 5000;
  try {
    pipeline::run_pipeline(c);
    ADD_FAILURE() << "expected failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InsufficientData);
    EXPECT_NE(std::string(e.what()).find("stage '"), std::string::npos) << e.what();
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
  fs::remove_all(dir);
}
