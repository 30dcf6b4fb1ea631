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
 * @file autodiff.hpp
 * @brief Tape-based reverse-mode differentiation over dense row-major
 *        double matrices, plus the Adam optimizer.
 *
 * Every tensor is two-dimensional (rows x cols); a scalar is 1 x 1. Records
 * are appended in evaluation order, so walking the tape backwards is a valid
 * reverse topological order and visits each record once.
 */

#pragma once

#include <tcast/error.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tcast::ad {

class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    require(rows >= 1 && cols >= 1, Errc::ShapeError, "tensor dimensions must be >= 1");
  }
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    require(rows >= 1 && cols >= 1, Errc::ShapeError, "tensor dimensions must be >= 1");
    require(data_.size() == rows * cols, Errc::ShapeError, "data length does not match shape");
  }

  static Tensor row(std::initializer_list<double> v) { return Tensor(1, v.size(), std::vector<double>(v)); }
  static Tensor scalar(double v) { return Tensor(1, 1, v); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::array<std::size_t, 2> shape() const noexcept { return {rows_, cols_}; }
  bool same_shape(const Tensor& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double item() const {
    require(size() == 1, Errc::ShapeError, "item() on non-scalar tensor");
    return data_[0];
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool requires_grad = false;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

inline CMapMat as_mat(const Tensor& t) {
  return CMapMat(t.data().data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}
inline MapMat as_mat(std::vector<double>& d, std::size_t r, std::size_t c) {
  return MapMat(d.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

class Tape;

/// Handle to a record on a tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// Gradients of leaf tensors that require them, keyed by record id.
using Gradients = std::map<std::size_t, Tensor>;

class Tape {
 public:
  using Backprop = std::function<void(Tape&, std::size_t)>;

  struct Record {
    Tensor value;
    std::vector<double> grad;
    bool requires_grad = false;
    bool leaf = true;
    Backprop backward;
  };

  Var leaf(Tensor t) {
    const bool rg = t.requires_grad;
    return push(std::move(t), rg, {}, true);
  }
  Var parameter(Tensor t) {
    t.requires_grad = true;
    return leaf(std::move(t));
  }
  Var constant(Tensor t) {
    t.requires_grad = false;
    return leaf(std::move(t));
  }

  Var push(Tensor value, bool requires_grad, Backprop fn, bool is_leaf = false) {
    records_.push_back(Record{std::move(value), {}, requires_grad, is_leaf, std::move(fn)});
    records_.back().value.requires_grad = requires_grad;
    return Var{this, records_.size() - 1};
  }

  const Tensor& value(std::size_t id) const { return records_[id].value; }
  bool requires_grad(std::size_t id) const { return records_[id].requires_grad; }

  /// Gradient buffer for a record, allocated zeroed on first use.
  std::vector<double>& grad(std::size_t id) {
    auto& r = records_[id];
    if (r.grad.empty()) r.grad.assign(r.value.size(), 0.0);
    return r.grad;
  }

  std::size_t size() const noexcept { return records_.size(); }

  Gradients backward(Var loss) {
    require(loss.tape == this, Errc::ShapeError, "loss belongs to another tape");
    require(value(loss.id).size() == 1, Errc::ShapeError, "backward() needs a scalar loss");
    require(!records_.empty(), Errc::ShapeError, "empty tape");
    for (auto& r : records_) r.grad.clear();
    grad(loss.id)[0] = 1.0;
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      auto& r = records_[i];
      if (!r.requires_grad || r.grad.empty() || !r.backward) continue;
      r.backward(*this, i);
    }
    Gradients out;
    for (std::size_t i = 0; i < records_.size(); ++i) {
      auto& r = records_[i];
      if (!r.leaf || !r.requires_grad) continue;
      Tensor g(r.value.rows(), r.value.cols());
      if (!r.grad.empty()) g.data() = r.grad;
      out.emplace(i, std::move(g));
    }
    return out;
  }

 private:
  std::vector<Record> records_;
};

inline const Tensor& Var::value() const { return tape->value(id); }

namespace detail {

inline bool any_grad(std::initializer_list<Var> vs) {
  for (const auto& v : vs)
    if (v.tape->requires_grad(v.id)) return true;
  return false;
}

inline void same_tape(const Var& a, const Var& b) {
  require(a.tape == b.tape, Errc::ShapeError, "operands live on different tapes");
}

template <typename F>
Var unary(Var a, F&& f, std::function<double(double x, double y)> dfdx) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  const bool rg = any_grad({a});
  return a.tape->push(std::move(out), rg, [a, dfdx](Tape& t, std::size_t self) {
    if (!t.requires_grad(a.id)) return;
    const auto& x = t.value(a.id);
    const auto& y = t.value(self);
    const auto& go = t.grad(self);
    auto& ga = t.grad(a.id);
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * dfdx(x[i], y[i]);
  });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Forward ops
// ---------------------------------------------------------------------------

inline Var matmul(Var a, Var b) {
  detail::same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.cols() == bv.rows(), Errc::ShapeError,
          "matmul: (" + std::to_string(av.rows()) + "x" + std::to_string(av.cols()) + ") * (" +
              std::to_string(bv.rows()) + "x" + std::to_string(bv.cols()) + ")");
  Tensor out(av.rows(), bv.cols());
  as_mat(out.data(), out.rows(), out.cols()).noalias() = as_mat(av) * as_mat(bv);
  return a.tape->push(std::move(out), detail::any_grad({a, b}), [a, b](Tape& t, std::size_t self) {
    const auto& A = t.value(a.id);
    const auto& B = t.value(b.id);
    auto& go = t.grad(self);
    const CMapMat G(go.data(), static_cast<Eigen::Index>(A.rows()), static_cast<Eigen::Index>(B.cols()));
    if (t.requires_grad(a.id)) as_mat(t.grad(a.id), A.rows(), A.cols()).noalias() += G * as_mat(B).transpose();
    if (t.requires_grad(b.id)) as_mat(t.grad(b.id), B.rows(), B.cols()).noalias() += as_mat(A).transpose() * G;
  });
}

/// Elementwise sum; `b` may also be a 1 x cols bias row added to every row.
inline Var add(Var a, Var b) {
  detail::same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool bias = !av.same_shape(bv);
  require(!bias || (bv.rows() == 1 && bv.cols() == av.cols()), Errc::ShapeError, "add: incompatible shapes");
  Tensor out = av;
  const std::size_t C = av.cols();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bias ? bv[i % C] : bv[i];
  return a.tape->push(std::move(out), detail::any_grad({a, b}), [a, b, bias, C](Tape& t, std::size_t self) {
    const auto& go = t.grad(self);
    if (t.requires_grad(a.id)) {
      auto& ga = t.grad(a.id);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
    }
    if (t.requires_grad(b.id)) {
      auto& gb = t.grad(b.id);
      for (std::size_t i = 0; i < go.size(); ++i) gb[bias ? i % C : i] += go[i];
    }
  });
}

inline Var sub(Var a, Var b) {
  detail::same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.same_shape(bv), Errc::ShapeError, "sub: shape mismatch");
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return a.tape->push(std::move(out), detail::any_grad({a, b}), [a, b](Tape& t, std::size_t self) {
    const auto& go = t.grad(self);
    if (t.requires_grad(a.id)) {
      auto& ga = t.grad(a.id);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
    }
    if (t.requires_grad(b.id)) {
      auto& gb = t.grad(b.id);
      for (std::size_t i = 0; i < go.size(); ++i) gb[i] -= go[i];
    }
  });
}

/// Elementwise (Hadamard) product.
inline Var mul(Var a, Var b) {
  detail::same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.same_shape(bv), Errc::ShapeError, "mul: shape mismatch");
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return a.tape->push(std::move(out), detail::any_grad({a, b}), [a, b](Tape& t, std::size_t self) {
    const auto& go = t.grad(self);
    const auto& A = t.value(a.id);
    const auto& B = t.value(b.id);
    if (t.requires_grad(a.id)) {
      auto& ga = t.grad(a.id);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * B[i];
    }
    if (t.requires_grad(b.id)) {
      auto& gb = t.grad(b.id);
      for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i] * A[i];
    }
  });
}

/// Multiplies row r of `a` (R x C) by w(r, 0) for an R x 1 `w`.
inline Var scale_rows(Var a, Var w) {
  detail::same_tape(a, w);
  const Tensor& av = a.value();
  const Tensor& wv = w.value();
  require(wv.cols() == 1 && wv.rows() == av.rows(), Errc::ShapeError, "scale_rows: weight must be rows x 1");
  Tensor out = av;
  const std::size_t C = av.cols();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= wv[i / C];
  return a.tape->push(std::move(out), detail::any_grad({a, w}), [a, w, C](Tape& t, std::size_t self) {
    const auto& go = t.grad(self);
    const auto& A = t.value(a.id);
    const auto& W = t.value(w.id);
    if (t.requires_grad(a.id)) {
      auto& ga = t.grad(a.id);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * W[i / C];
    }
    if (t.requires_grad(w.id)) {
      auto& gw = t.grad(w.id);
      for (std::size_t i = 0; i < go.size(); ++i) gw[i / C] += go[i] * A[i];
    }
  });
}

inline Var scale(Var a, double c) {
  return detail::unary(a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

/// 1 - a, elementwise.
inline Var one_minus(Var a) {
  return detail::unary(a, [](double x) { return 1.0 - x; }, [](double, double) { return -1.0; });
}

inline double sigmoid_value(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Var sigmoid(Var a) {
  return detail::unary(a, sigmoid_value, [](double, double y) { return y * (1.0 - y); });
}

inline Var tanh(Var a) {
  return detail::unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

inline Var square(Var a) {
  return detail::unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

/// Softmax along axis 0 (down each column) or 1 (across each row).
inline Var softmax(Var a, int axis) {
  require(axis == 0 || axis == 1, Errc::ShapeError, "softmax axis must be 0 or 1");
  const Tensor& av = a.value();
  const std::size_t R = av.rows(), C = av.cols();
  const std::size_t outer = axis == 1 ? R : C;
  const std::size_t inner = axis == 1 ? C : R;
  auto at = [=](std::size_t o, std::size_t k) { return axis == 1 ? o * C + k : k * C + o; };
  Tensor out(R, C);
  for (std::size_t o = 0; o < outer; ++o) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < inner; ++k) mx = std::max(mx, av[at(o, k)]);
    double sum = 0.0;
    for (std::size_t k = 0; k < inner; ++k) sum += (out[at(o, k)] = std::exp(av[at(o, k)] - mx));
    for (std::size_t k = 0; k < inner; ++k) out[at(o, k)] /= sum;
  }
  return a.tape->push(std::move(out), detail::any_grad({a}), [a, outer, inner, at](Tape& t, std::size_t self) {
    if (!t.requires_grad(a.id)) return;
    const auto& y = t.value(self);
    const auto& go = t.grad(self);
    auto& ga = t.grad(a.id);
    for (std::size_t o = 0; o < outer; ++o) {
      double dot = 0.0;
      for (std::size_t k = 0; k < inner; ++k) dot += go[at(o, k)] * y[at(o, k)];
      for (std::size_t k = 0; k < inner; ++k) ga[at(o, k)] += y[at(o, k)] * (go[at(o, k)] - dot);
    }
  });
}

/// Concatenation along axis 0 (stack rows) or 1 (side by side).
inline Var concat(const std::vector<Var>& parts, int axis) {
  require(!parts.empty(), Errc::ShapeError, "concat of nothing");
  require(axis == 0 || axis == 1, Errc::ShapeError, "concat axis must be 0 or 1");
  Tape* tape = parts.front().tape;
  std::size_t R = parts.front().rows(), C = parts.front().cols();
  bool rg = false;
  for (std::size_t k = 1; k < parts.size(); ++k) {
    detail::same_tape(parts.front(), parts[k]);
    if (axis == 1) {
      require(parts[k].rows() == R, Errc::ShapeError, "concat(axis=1): row counts differ");
      C += parts[k].cols();
    } else {
      require(parts[k].cols() == C, Errc::ShapeError, "concat(axis=0): column counts differ");
      R += parts[k].rows();
    }
  }
  for (const auto& p : parts) rg = rg || tape->requires_grad(p.id);
  Tensor out(R, C);
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const auto& p : parts) {
    const Tensor& pv = p.value();
    offsets.push_back(off);
    for (std::size_t r = 0; r < pv.rows(); ++r)
      for (std::size_t c = 0; c < pv.cols(); ++c) {
        if (axis == 1)
          out(r, off + c) = pv(r, c);
        else
          out(off + r, c) = pv(r, c);
      }
    off += axis == 1 ? pv.cols() : pv.rows();
  }
  return tape->push(std::move(out), rg, [parts, offsets, axis, C](Tape& t, std::size_t self) {
    const auto& go = t.grad(self);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (!t.requires_grad(parts[k].id)) continue;
      const auto& pv = t.value(parts[k].id);
      auto& gp = t.grad(parts[k].id);
      for (std::size_t r = 0; r < pv.rows(); ++r)
        for (std::size_t c = 0; c < pv.cols(); ++c) {
          const std::size_t src = axis == 1 ? r * C + offsets[k] + c : (offsets[k] + r) * C + c;
          gp[r * pv.cols() + c] += go[src];
        }
    }
  });
}

/// Half-open range [begin, end) along an axis.
inline Var slice(Var a, int axis, std::size_t begin, std::size_t end) {
  require(axis == 0 || axis == 1, Errc::ShapeError, "slice axis must be 0 or 1");
  const Tensor& av = a.value();
  const std::size_t extent = axis == 1 ? av.cols() : av.rows();
  require(begin < end && end <= extent, Errc::ShapeError, "slice range out of bounds");
  const std::size_t R = axis == 1 ? av.rows() : end - begin;
  const std::size_t C = axis == 1 ? end - begin : av.cols();
  const std::size_t src_cols = av.cols();
  Tensor out(R, C);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < C; ++c) out(r, c) = axis == 1 ? av(r, begin + c) : av(begin + r, c);
  return a.tape->push(std::move(out), detail::any_grad({a}),
                      [a, axis, begin, R, C, src_cols](Tape& t, std::size_t self) {
                        if (!t.requires_grad(a.id)) return;
                        const auto& go = t.grad(self);
                        auto& ga = t.grad(a.id);
                        for (std::size_t r = 0; r < R; ++r)
                          for (std::size_t c = 0; c < C; ++c) {
                            const std::size_t dst = axis == 1 ? r * src_cols + begin + c : (begin + r) * src_cols + c;
                            ga[dst] += go[r * C + c];
                          }
                      });
}

/// Mean of all elements, as a 1 x 1 tensor.
inline Var mean(Var a) {
  const Tensor& av = a.value();
  double s = 0.0;
  for (double v : av.data()) s += v;
  const double n = static_cast<double>(av.size());
  return a.tape->push(Tensor::scalar(s / n), detail::any_grad({a}), [a, n](Tape& t, std::size_t self) {
    if (!t.requires_grad(a.id)) return;
    const double g = t.grad(self)[0] / n;
    for (auto& v : t.grad(a.id)) v += g;
  });
}

/// Sum of squared elements, as a 1 x 1 tensor.
inline Var sum_squares(Var a) {
  const Tensor& av = a.value();
  double s = 0.0;
  for (double v : av.data()) s += v * v;
  return a.tape->push(Tensor::scalar(s), detail::any_grad({a}), [a](Tape& t, std::size_t self) {
    if (!t.requires_grad(a.id)) return;
    const double g = t.grad(self)[0];
    const auto& x = t.value(a.id);
    auto& ga = t.grad(a.id);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += 2.0 * g * x[i];
  });
}

inline Var mse(Var pred, Var target) {
  const double n = static_cast<double>(pred.value().size());
  return scale(sum_squares(sub(pred, target)), 1.0 / n);
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long step = 0;
};

/// One bias-corrected Adam update of every parameter in place.
inline void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state,
                      const AdamConfig& cfg) {
  require(params.size() == grads.size(), Errc::ShapeError, "adam: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.rows(), p.cols());
      state.v.emplace_back(p.rows(), p.cols());
    }
  }
  require(state.m.size() == params.size(), Errc::ShapeError, "adam: state does not match parameters");
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    const auto& g = grads[k];
    require(p.same_shape(g) && p.same_shape(state.m[k]), Errc::ShapeError, "adam: shape mismatch");
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mh = m[i] / bc1;
      const double vh = v[i] / bc2;
      p[i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    }
  }
}

}  // namespace tcast::ad
