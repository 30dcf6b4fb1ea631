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
 * @file seqmodels.hpp
 * @brief Lag windowing, the five recurrent forecasters, training and
 *        prediction for single-step-ahead forecasting.
 *
 * Every model maps a window (y(t-p) .. y(t-1)) to y(t). Inputs are fed one
 * value per time step, oldest first.
 */

#pragma once

#include <tcast/autodiff.hpp>
#include <tcast/error.hpp>
#include <tcast/series.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tcast::seq {

using ad::Tape;
using ad::Tensor;
using ad::Var;

// ---------------------------------------------------------------------------
// Windowing
// ---------------------------------------------------------------------------

struct WindowedDataset {
  std::size_t lags = 0;
  /// samples x lags, row-major.
  std::vector<double> inputs;
  std::vector<double> targets;
  /// Position of each target in the source series.
  std::vector<std::size_t> target_index;

  std::size_t samples() const noexcept { return targets.size(); }
  std::span<const double> row(std::size_t i) const { return {inputs.data() + i * lags, lags}; }

  WindowedDataset subset(std::size_t begin, std::size_t end) const {
    WindowedDataset out;
    out.lags = lags;
    out.inputs.assign(inputs.begin() + static_cast<std::ptrdiff_t>(begin * lags),
                      inputs.begin() + static_cast<std::ptrdiff_t>(end * lags));
    out.targets.assign(targets.begin() + static_cast<std::ptrdiff_t>(begin),
                       targets.begin() + static_cast<std::ptrdiff_t>(end));
    out.target_index.assign(target_index.begin() + static_cast<std::ptrdiff_t>(begin),
                            target_index.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
  }
};

inline WindowedDataset make_windows(std::span<const double> s, std::size_t p) {
  require(p >= 1, Errc::InsufficientData, "lag count must be at least 1");
  require(s.size() > p, Errc::InsufficientData,
          "series length " + std::to_string(s.size()) + " must exceed lag count " + std::to_string(p));
  WindowedDataset ds;
  ds.lags = p;
  const std::size_t n = s.size() - p;
  ds.inputs.reserve(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) ds.inputs.push_back(s[i + c]);
    ds.targets.push_back(s[i + p]);
    ds.target_index.push_back(i + p);
  }
  return ds;
}

/// Chronological split: the first floor(frac * samples) rows train.
inline std::pair<WindowedDataset, WindowedDataset> split(const WindowedDataset& ds, double train_frac = 0.70) {
  require(train_frac > 0.0 && train_frac < 1.0, Errc::ConfigError, "train fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(ds.samples())));
  require(n_train >= 1 && n_train < ds.samples(), Errc::InsufficientData,
          "split of " + std::to_string(ds.samples()) + " samples leaves an empty part");
  return {ds.subset(0, n_train), ds.subset(n_train, ds.samples())};
}

// ---------------------------------------------------------------------------
// Model specification and parameters
// ---------------------------------------------------------------------------

enum class Architecture { Rnn, Lstm, Gru, LstmSeq2Seq, LstmSeq2SeqAttention };

inline constexpr Architecture kAllArchitectures[] = {Architecture::Rnn, Architecture::Lstm,
                                                     Architecture::LstmSeq2Seq,
                                                     Architecture::LstmSeq2SeqAttention, Architecture::Gru};

inline std::string_view to_string(Architecture a) noexcept {
  switch (a) {
    case Architecture::Rnn: return "RNN";
    case Architecture::Lstm: return "LSTM";
    case Architecture::Gru: return "GRU";
    case Architecture::LstmSeq2Seq: return "LSTM_Seq2Seq";
    case Architecture::LstmSeq2SeqAttention: return "LSTM_Seq2Seq_ATN";
  }
  return "?";
}

inline Architecture parse_architecture(std::string_view s) {
  std::string k(s);
  for (auto& ch : k) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (k == "rnn") return Architecture::Rnn;
  if (k == "lstm") return Architecture::Lstm;
  if (k == "gru") return Architecture::Gru;
  if (k == "lstm_seq2seq" || k == "seq2seq") return Architecture::LstmSeq2Seq;
  if (k == "lstm_seq2seq_atn" || k == "seq2seq_atn" || k == "attention") return Architecture::LstmSeq2SeqAttention;
  fail(Errc::ConfigError, "unknown architecture '" + std::string(s) + "'");
}

struct ModelSpec {
  Architecture architecture = Architecture::Lstm;
  std::size_t hidden_size = 64;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool shuffle = true;

  void validate() const {
    require(hidden_size >= 1, Errc::ConfigError, "hidden_size must be >= 1");
    require(epochs >= 1, Errc::ConfigError, "epochs must be >= 1");
    require(batch_size >= 1, Errc::ConfigError, "batch_size must be >= 1");
    require(learning_rate >= 0.0, Errc::ConfigError, "learning_rate must be >= 0");
  }
};

/// Portable uniform draw in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct ParameterSet {
  std::vector<std::string> names;
  std::vector<Tensor> values;

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    fail(Errc::ShapeError, "no parameter named '" + std::string(name) + "'");
  }
  const Tensor& operator[](std::string_view name) const { return values[index_of(name)]; }
  Tensor& operator[](std::string_view name) { return values[index_of(name)]; }
  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& t : values) n += t.size();
    return n;
  }
};

namespace detail {

/// Weight and its bias drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
inline void add_dense(ParameterSet& ps, std::mt19937_64& rng, const std::string& name, std::size_t fan_in,
                      std::size_t fan_out, bool with_bias = true) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor w(fan_in, fan_out);
  for (auto& v : w.data()) v = (2.0 * uniform01(rng) - 1.0) * bound;
  ps.names.push_back("W_" + name);
  ps.values.push_back(std::move(w));
  if (!with_bias) return;
  Tensor b(1, fan_out);
  for (auto& v : b.data()) v = (2.0 * uniform01(rng) - 1.0) * bound;
  ps.names.push_back("b_" + name);
  ps.values.push_back(std::move(b));
}

}  // namespace detail

/// Freshly initialized parameters for an architecture; one scalar input per step.
inline ParameterSet init_parameters(Architecture arch, std::size_t hidden, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParameterSet ps;
  const std::size_t H = hidden, I = 1;
  switch (arch) {
    case Architecture::Rnn:
      detail::add_dense(ps, rng, "rnn", I + H, H);
      break;
    case Architecture::Lstm:
      detail::add_dense(ps, rng, "lstm", I + H, 4 * H);
      break;
    case Architecture::Gru:
      detail::add_dense(ps, rng, "gru_zr", I + H, 2 * H);
      detail::add_dense(ps, rng, "gru_n", I + H, H);
      break;
    case Architecture::LstmSeq2Seq:
      detail::add_dense(ps, rng, "enc", I + H, 4 * H);
      detail::add_dense(ps, rng, "dec", I + H, 4 * H);
      break;
    case Architecture::LstmSeq2SeqAttention:
      detail::add_dense(ps, rng, "enc", I + H, 4 * H);
      detail::add_dense(ps, rng, "dec", I + H, 4 * H);
      detail::add_dense(ps, rng, "att_query", H, H, false);
      detail::add_dense(ps, rng, "att_key", H, H);
      detail::add_dense(ps, rng, "att_score", H, 1, false);
      break;
  }
  const std::size_t out_in = arch == Architecture::LstmSeq2SeqAttention ? 2 * H : H;
  detail::add_dense(ps, rng, "out", out_in, 1);
  return ps;
}

// ---------------------------------------------------------------------------
// Cells
// ---------------------------------------------------------------------------

/// h' = tanh([x, h] W + b)
inline Var rnn_cell(Var x, Var h, Var W, Var b) { return ad::tanh(ad::add(ad::matmul(ad::concat({x, h}, 1), W), b)); }

struct LstmState {
  Var h;
  Var c;
};

/// Gate layout in W's columns: input, forget, candidate, output.
inline LstmState lstm_cell(Var x, const LstmState& s, Var W, Var b) {
  const std::size_t H = s.h.cols();
  require(W.cols() == 4 * H, Errc::ShapeError, "lstm weight must have 4*hidden columns");
  const Var z = ad::add(ad::matmul(ad::concat({x, s.h}, 1), W), b);
  const Var i = ad::sigmoid(ad::slice(z, 1, 0, H));
  const Var f = ad::sigmoid(ad::slice(z, 1, H, 2 * H));
  const Var g = ad::tanh(ad::slice(z, 1, 2 * H, 3 * H));
  const Var o = ad::sigmoid(ad::slice(z, 1, 3 * H, 4 * H));
  const Var c = ad::add(ad::mul(f, s.c), ad::mul(i, g));
  return {ad::mul(o, ad::tanh(c)), c};
}

/// z, r = sigmoid([x, h] W_zr + b_zr); n = tanh([x, r*h] W_n + b_n);
/// h' = (1 - z) * n + z * h
inline Var gru_cell(Var x, Var h, Var W_zr, Var b_zr, Var W_n, Var b_n) {
  const std::size_t H = h.cols();
  require(W_zr.cols() == 2 * H && W_n.cols() == H, Errc::ShapeError, "gru weight shapes do not match hidden size");
  const Var zr = ad::sigmoid(ad::add(ad::matmul(ad::concat({x, h}, 1), W_zr), b_zr));
  const Var z = ad::slice(zr, 1, 0, H);
  const Var r = ad::slice(zr, 1, H, 2 * H);
  const Var n = ad::tanh(ad::add(ad::matmul(ad::concat({x, ad::mul(r, h)}, 1), W_n), b_n));
  return ad::add(ad::mul(ad::one_minus(z), n), ad::mul(z, h));
}

struct AttentionOutput {
  Var context;
  /// batch x steps; each row sums to one.
  Var weights;
};

/// Additive attention: score_j = v . tanh(s W_q + h_j W_k + b_k).
inline AttentionOutput additive_attention(Var query, const std::vector<Var>& keys, Var W_q, Var W_k, Var b_k,
                                          Var v) {
  require(!keys.empty(), Errc::ShapeError, "attention over no encoder states");
  const Var q = ad::matmul(query, W_q);
  std::vector<Var> scores;
  scores.reserve(keys.size());
  for (const auto& k : keys) scores.push_back(ad::matmul(ad::tanh(ad::add(ad::add(ad::matmul(k, W_k), b_k), q)), v));
  const Var weights = ad::softmax(ad::concat(scores, 1), 1);
  Var context = ad::scale_rows(keys[0], ad::slice(weights, 1, 0, 1));
  for (std::size_t j = 1; j < keys.size(); ++j)
    context = ad::add(context, ad::scale_rows(keys[j], ad::slice(weights, 1, j, j + 1)));
  return {context, weights};
}

// ---------------------------------------------------------------------------
// Model forward
// ---------------------------------------------------------------------------

struct ForwardResult {
  Var prediction;  // batch x 1
  std::optional<Var> attention;
};

/// Runs an architecture over a batch of windows (batch x lags tensor).
inline ForwardResult forward(Architecture arch, Tape& tape, const ParameterSet& names_only,
                             const std::vector<Var>& params, Var inputs) {
  auto P = [&](std::string_view n) { return params[names_only.index_of(n)]; };
  const std::size_t B = inputs.rows();
  const std::size_t steps = inputs.cols();
  const std::size_t H = P("W_out").rows() / (arch == Architecture::LstmSeq2SeqAttention ? 2 : 1);
  const Var zeros = tape.constant(Tensor(B, H));
  auto step_input = [&](std::size_t t) { return ad::slice(inputs, 1, t, t + 1); };

  ForwardResult res;
  Var features{};
  switch (arch) {
    case Architecture::Rnn: {
      Var h = zeros;
      for (std::size_t t = 0; t < steps; ++t) h = rnn_cell(step_input(t), h, P("W_rnn"), P("b_rnn"));
      features = h;
      break;
    }
    case Architecture::Lstm: {
      LstmState s{zeros, zeros};
      for (std::size_t t = 0; t < steps; ++t) s = lstm_cell(step_input(t), s, P("W_lstm"), P("b_lstm"));
      features = s.h;
      break;
    }
    case Architecture::Gru: {
      Var h = zeros;
      for (std::size_t t = 0; t < steps; ++t)
        h = gru_cell(step_input(t), h, P("W_gru_zr"), P("b_gru_zr"), P("W_gru_n"), P("b_gru_n"));
      features = h;
      break;
    }
    case Architecture::LstmSeq2Seq:
    case Architecture::LstmSeq2SeqAttention: {
      LstmState s{zeros, zeros};
      std::vector<Var> enc_states;
      for (std::size_t t = 0; t < steps; ++t) {
        s = lstm_cell(step_input(t), s, P("W_enc"), P("b_enc"));
        enc_states.push_back(s.h);
      }
      // Single decoder step from the final encoder state, zero start token.
      const Var start = tape.constant(Tensor(B, 1));
      const LstmState d = lstm_cell(start, s, P("W_dec"), P("b_dec"));
      if (arch == Architecture::LstmSeq2Seq) {
        features = d.h;
      } else {
        auto att = additive_attention(d.h, enc_states, P("W_att_query"), P("W_att_key"), P("b_att_key"),
                                      P("W_att_score"));
        features = ad::concat({d.h, att.context}, 1);
        res.attention = att.weights;
      }
      break;
    }
  }
  res.prediction = ad::add(ad::matmul(features, P("W_out")), P("b_out"));
  return res;
}

// ---------------------------------------------------------------------------
// Training and prediction
// ---------------------------------------------------------------------------

struct FittedModel {
  ModelSpec spec;
  std::size_t lags = 0;
  MinMaxScaler scaler;
  ParameterSet params;
  std::vector<double> epoch_loss;
};

namespace detail {

inline Tensor batch_inputs(const WindowedDataset& ds, std::span<const std::size_t> rows, const MinMaxScaler& sc) {
  Tensor x(rows.size(), ds.lags);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = ds.row(rows[r]);
    for (std::size_t c = 0; c < ds.lags; ++c) x(r, c) = sc.apply(src[c]);
  }
  return x;
}

inline Tensor batch_targets(const WindowedDataset& ds, std::span<const std::size_t> rows, const MinMaxScaler& sc) {
  Tensor y(rows.size(), 1);
  for (std::size_t r = 0; r < rows.size(); ++r) y[r] = sc.apply(ds.targets[rows[r]]);
  return y;
}

inline MinMaxScaler fit_scaler(const WindowedDataset& ds) {
  std::vector<double> all(ds.inputs);
  all.insert(all.end(), ds.targets.begin(), ds.targets.end());
  return MinMaxScaler::fit(all);
}

}  // namespace detail

/// Mean-squared-error loss and gradients for one batch of normalized data.
inline std::pair<double, std::vector<Tensor>> batch_loss_and_gradients(Architecture arch, const ParameterSet& params,
                                                                       const Tensor& x, const Tensor& y) {
  Tape tape;
  std::vector<Var> pv;
  pv.reserve(params.values.size());
  for (const auto& t : params.values) pv.push_back(tape.parameter(t));
  const Var in = tape.constant(x);
  const Var target = tape.constant(y);
  const auto fr = forward(arch, tape, params, pv, in);
  const Var loss = ad::mse(fr.prediction, target);
  auto grads = tape.backward(loss);
  std::vector<Tensor> g;
  g.reserve(pv.size());
  for (const auto& v : pv) g.push_back(std::move(grads.at(v.id)));
  return {loss.value().item(), std::move(g)};
}

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/**
 * Minibatch Adam on MSE. The scaler is fitted to the training windows and
 * stored with the model. Shuffling uses the spec seed, so a fixed seed gives
 * a bitwise-identical trajectory.
 */
inline FittedModel train(const WindowedDataset& train_set, const ModelSpec& spec, const EpochCallback& on_epoch = {}) {
  spec.validate();
  require(train_set.samples() >= 1, Errc::InsufficientData, "empty training set");
  FittedModel model;
  model.spec = spec;
  model.lags = train_set.lags;
  model.scaler = detail::fit_scaler(train_set);
  model.params = init_parameters(spec.architecture, spec.hidden_size, spec.seed);

  std::mt19937_64 rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
  ad::AdamState adam;
  const ad::AdamConfig acfg{spec.learning_rate, spec.beta1, spec.beta2, spec.eps};
  std::vector<std::size_t> order(train_set.samples());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    if (spec.shuffle) {
      for (std::size_t i = order.size(); i-- > 1;) std::swap(order[i], order[rng() % (i + 1)]);
    }
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
      const std::size_t end = std::min(order.size(), start + spec.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      const Tensor x = detail::batch_inputs(train_set, rows, model.scaler);
      const Tensor y = detail::batch_targets(train_set, rows, model.scaler);
      auto [loss, grads] = batch_loss_and_gradients(spec.architecture, model.params, x, y);
      require(std::isfinite(loss), Errc::TrainingDiverged,
              "loss became non-finite at epoch " + std::to_string(epoch + 1));
      total += loss * static_cast<double>(rows.size());
      ad::adam_step(model.params.values, grads, adam, acfg);
    }
    const double epoch_loss = total / static_cast<double>(order.size());
    model.epoch_loss.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch + 1, epoch_loss);
  }
  return model;
}

struct Prediction {
  std::vector<double> values;
  /// Attention weights per sample (rows of length lags) when the model has them.
  std::vector<std::vector<double>> attention;
};

/// One forecast per row, in the original (denormalized) units.
inline Prediction predict_detailed(const FittedModel& model, const WindowedDataset& ds, std::size_t batch = 256) {
  require(ds.samples() == 0 || ds.lags == model.lags, Errc::ShapeError,
          "dataset has " + std::to_string(ds.lags) + " lags, model expects " + std::to_string(model.lags));
  Prediction out;
  out.values.reserve(ds.samples());
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < ds.samples(); start += batch) {
    const std::size_t end = std::min(ds.samples(), start + batch);
    rows.clear();
    for (std::size_t i = start; i < end; ++i) rows.push_back(i);
    Tape tape;
    std::vector<Var> pv;
    for (const auto& t : model.params.values) pv.push_back(tape.constant(t));
    const Var in = tape.constant(detail::batch_inputs(ds, rows, model.scaler));
    const auto fr = forward(model.spec.architecture, tape, model.params, pv, in);
    const auto& pred = fr.prediction.value();
    for (std::size_t r = 0; r < rows.size(); ++r) out.values.push_back(model.scaler.invert(pred[r]));
    if (fr.attention) {
      const auto& w = fr.attention->value();
      for (std::size_t r = 0; r < w.rows(); ++r)
        out.attention.emplace_back(w.data().begin() + static_cast<std::ptrdiff_t>(r * w.cols()),
                                   w.data().begin() + static_cast<std::ptrdiff_t>((r + 1) * w.cols()));
    }
  }
  return out;
}

inline std::vector<double> predict(const FittedModel& model, const WindowedDataset& ds) {
  return predict_detailed(model, ds).values;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------
//
// Little-endian binary layout:
//   "TCKP"  u8 version(=1)  u8 architecture  u32 hidden  u32 lags
//   f64 scaler_min  f64 scaler_max  u32 n_params
//   per parameter: u32 name_len, name bytes, u32 rows, u32 cols, f64[rows*cols]

inline constexpr std::uint8_t kCheckpointVersion = 1;

namespace detail {
template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(in.good(), Errc::MalformedInput, "truncated checkpoint");
  return v;
}
}  // namespace detail

inline void save_checkpoint(std::ostream& out, const FittedModel& m) {
  out.write("TCKP", 4);
  detail::put<std::uint8_t>(out, kCheckpointVersion);
  detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(m.spec.architecture));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(m.spec.hidden_size));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(m.lags));
  detail::put<double>(out, m.scaler.min);
  detail::put<double>(out, m.scaler.max);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(m.params.values.size()));
  for (std::size_t k = 0; k < m.params.values.size(); ++k) {
    const auto& name = m.params.names[k];
    const auto& t = m.params.values[k];
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows()));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols()));
    out.write(reinterpret_cast<const char*>(t.data().data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
}

inline FittedModel load_checkpoint(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, "TCKP", 4) == 0, Errc::MalformedInput, "not a tcast checkpoint");
  const auto version = detail::get<std::uint8_t>(in);
  require(version == kCheckpointVersion, Errc::MalformedInput,
          "unsupported checkpoint version " + std::to_string(version));
  FittedModel m;
  const auto arch = detail::get<std::uint8_t>(in);
  require(arch <= static_cast<std::uint8_t>(Architecture::LstmSeq2SeqAttention), Errc::MalformedInput,
          "unknown architecture id in checkpoint");
  m.spec.architecture = static_cast<Architecture>(arch);
  m.spec.hidden_size = detail::get<std::uint32_t>(in);
  m.lags = detail::get<std::uint32_t>(in);
  m.scaler.min = detail::get<double>(in);
  m.scaler.max = detail::get<double>(in);
  const auto count = detail::get<std::uint32_t>(in);
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto len = detail::get<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto rows = detail::get<std::uint32_t>(in);
    const auto cols = detail::get<std::uint32_t>(in);
    Tensor t(rows, cols);
    in.read(reinterpret_cast<char*>(t.data().data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
    require(in.good(), Errc::MalformedInput, "truncated checkpoint tensor '" + name + "'");
    m.params.names.push_back(std::move(name));
    m.params.values.push_back(std::move(t));
  }
  const auto expected = init_parameters(m.spec.architecture, m.spec.hidden_size, 0);
  require(expected.names == m.params.names, Errc::MalformedInput, "checkpoint parameter names do not match architecture");
  for (std::size_t k = 0; k < expected.values.size(); ++k)
    require(expected.values[k].same_shape(m.params.values[k]), Errc::MalformedInput,
            "checkpoint tensor '" + m.params.names[k] + "' has the wrong shape");
  return m;
}

inline void save_checkpoint_file(const std::string& path, const FittedModel& m) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::IoError, "cannot write " + path);
  save_checkpoint(out, m);
}

inline FittedModel load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoError, "cannot open " + path);
  return load_checkpoint(in);
}

}  // namespace tcast::seq
