// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/tiny_denoiser.hpp"

#include <cmath>

#include "sbse/error.hpp"
#include "sbse/rng.hpp"

namespace sbse {

namespace {

int reflect(int i, int n) {
  if (n == 1) return 0;
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

// Array expressions so Eigen vectorizes exp().
Eigen::MatrixXd silu(const Eigen::MatrixXd& z) {
  return (z.array() / (1.0 + (-z.array()).exp())).matrix();
}

Eigen::MatrixXd silu_grad(const Eigen::MatrixXd& z) {
  const Eigen::ArrayXXd s = 1.0 / (1.0 + (-z.array()).exp());
  return (s * (1.0 + z.array() * (1.0 - s))).matrix();
}

// |c| without hypot's overflow guards; the inputs are small.
double magnitude(const cplx& c) { return std::sqrt(std::norm(c)); }

}  // namespace

void TinyDenoiserConfig::validate() const {
  if (hidden.empty()) throw ConfigError("tiny denoiser: need at least one hidden layer");
  for (int h : hidden)
    if (h <= 0) throw ConfigError("tiny denoiser: hidden sizes must be positive");
  if (time_features < 2 || time_features % 2 != 0)
    throw ConfigError("tiny denoiser: time_features must be even and >= 2");
}

TinyDenoiser::TinyDenoiser(TinyDenoiserConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  build_layout();
  Rng rng(cfg_.init_seed);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerView& lv = layers_[l];
    const bool last = l + 1 == layers_.size();
    const double scale = (last ? 0.01 : 1.0) / std::sqrt(static_cast<double>(lv.in));
    for (int i = 0; i < lv.in * lv.out; ++i) params_[lv.weight_offset + i] = scale * rng.normal();
  }
  // Start as the identity on the state: gains y -> 0, x_t -> 1.
  const LayerView& out = layers_.back();
  params_[out.bias_offset + 2] = 1.0;
}

TinyDenoiser::TinyDenoiser(TinyDenoiserConfig cfg, std::vector<double> params)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  build_layout();
  if (params.size() != params_.size())
    throw DataError("tiny denoiser: expected " + std::to_string(params_.size()) +
                    " parameters, got " + std::to_string(params.size()));
  params_ = std::move(params);
}

void TinyDenoiser::build_layout() {
  layers_.clear();
  std::size_t offset = 0;
  int in = cfg_.input_dim();
  std::vector<int> widths = cfg_.hidden;
  widths.push_back(TinyDenoiserConfig::kOutputDim);
  for (int out : widths) {
    LayerView lv{offset, offset + static_cast<std::size_t>(in) * out, in, out};
    offset = lv.bias_offset + static_cast<std::size_t>(out);
    layers_.push_back(lv);
    in = out;
  }
  params_.assign(offset, 0.0);
}

Eigen::MatrixXd TinyDenoiser::features(const ComplexSpectrogram& x_t, const ComplexSpectrogram& y,
                                       double t) const {
  const Eigen::MatrixXd local = local_features(x_t, y);
  Eigen::MatrixXd X(cfg_.input_dim(), local.cols());
  X.topRows(kLocalRows) = local.topRows(kLocalRows);
  X.middleRows(kLocalRows, cfg_.time_features).colwise() = time_features(t);
  X.bottomRows(1) = local.bottomRows(1);
  return X;
}

ComplexSpectrogram TinyDenoiser::estimate(const ComplexSpectrogram& x_t,
                                          const ComplexSpectrogram& y, double t) const {
  return forward(x_t, y, t, nullptr);
}

ComplexSpectrogram TinyDenoiser::forward(const ComplexSpectrogram& x_t, const ComplexSpectrogram& y,
                                         double t, Cache* cache) const {
  // The time features are shared by every position, so their first-layer
  // contribution is folded into the bias instead of being multiplied per
  // column. post[0] then holds only the local rows and the bin position.
  const Eigen::VectorXd time = time_features(t);
  Eigen::MatrixXd a = local_features(x_t, y);
  if (cache) {
    cache->x_t = x_t;
    cache->y = y;
    cache->time = time;
    cache->pre.clear();
    cache->post.clear();
  }
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const LayerView& lv = layers_[l];
    Eigen::Map<const Eigen::MatrixXd> W(params_.data() + lv.weight_offset, lv.out, lv.in);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + lv.bias_offset, lv.out);
    Eigen::MatrixXd z;
    if (l == 0) {
      z.noalias() = first_layer_local_weights() * a;
      z.colwise() += b + W.middleCols(kLocalRows, cfg_.time_features) * time;
    } else {
      z.noalias() = W * a;
      z.colwise() += b;
    }
    Eigen::MatrixXd next = silu(z);
    if (cache) {
      cache->post.push_back(std::move(a));
      cache->pre.push_back(std::move(z));
    }
    a = std::move(next);
  }
  const LayerView& lv = layers_.back();
  Eigen::Map<const Eigen::MatrixXd> W(params_.data() + lv.weight_offset, lv.out, lv.in);
  Eigen::Map<const Eigen::VectorXd> b(params_.data() + lv.bias_offset, lv.out);
  Eigen::MatrixXd o;
  o.noalias() = W * a;
  o.colwise() += b;

  ComplexSpectrogram out = x_t.zeros_like();
  for (std::size_t p = 0; p < out.size(); ++p) {
    const Eigen::Index i = static_cast<Eigen::Index>(p);
    out[p] = cplx(o(0, i), o(1, i)) * y[p] + cplx(o(2, i), o(3, i)) * x_t[p];
  }
  if (cache) {
    cache->post.push_back(std::move(a));
    cache->out = std::move(o);
  }
  return out;
}

void TinyDenoiser::backward(const Cache& cache, const ComplexSpectrogram& grad_estimate,
                            std::span<double> grad) const {
  if (grad.size() != params_.size())
    throw std::invalid_argument("tiny denoiser: gradient buffer has the wrong size");
  grad_estimate.require_same_shape(cache.x_t, "tiny denoiser backward");
  const Eigen::Index P = static_cast<Eigen::Index>(grad_estimate.size());

  Eigen::MatrixXd d(TinyDenoiserConfig::kOutputDim, P);
  for (Eigen::Index p = 0; p < P; ++p) {
    const cplx g = grad_estimate[static_cast<std::size_t>(p)];
    const cplx yv = cache.y[static_cast<std::size_t>(p)];
    const cplx xv = cache.x_t[static_cast<std::size_t>(p)];
    d(0, p) = g.real() * yv.real() + g.imag() * yv.imag();
    d(1, p) = -g.real() * yv.imag() + g.imag() * yv.real();
    d(2, p) = g.real() * xv.real() + g.imag() * xv.imag();
    d(3, p) = -g.real() * xv.imag() + g.imag() * xv.real();
  }

  for (std::size_t l = layers_.size(); l-- > 0;) {
    const LayerView& lv = layers_[l];
    const Eigen::MatrixXd& input = cache.post[l];
    Eigen::Map<Eigen::MatrixXd> dW(grad.data() + lv.weight_offset, lv.out, lv.in);
    Eigen::Map<Eigen::VectorXd> db(grad.data() + lv.bias_offset, lv.out);
    const Eigen::VectorXd d_sum = d.rowwise().sum();
    db += d_sum;
    if (l == 0) {
      const Eigen::MatrixXd g_local = d * input.transpose();
      dW.leftCols(kLocalRows) += g_local.leftCols(kLocalRows);
      dW.col(lv.in - 1) += g_local.col(kLocalRows);
      dW.middleCols(kLocalRows, cfg_.time_features) += d_sum * cache.time.transpose();
      break;
    }
    dW.noalias() += d * input.transpose();
    Eigen::Map<const Eigen::MatrixXd> W(params_.data() + lv.weight_offset, lv.out, lv.in);
    Eigen::MatrixXd da;
    da.noalias() = W.transpose() * d;
    d = da.cwiseProduct(silu_grad(cache.pre[l - 1]));
  }
}

Eigen::VectorXd TinyDenoiser::time_features(double t) const {
  Eigen::VectorXd time(cfg_.time_features);
  for (int j = 0; j < cfg_.time_features / 2; ++j) {
    const double w = std::ldexp(1.0, j);
    time(2 * j) = std::sin(w * t);
    time(2 * j + 1) = std::cos(w * t);
  }
  return time;
}

Eigen::MatrixXd TinyDenoiser::local_features(const ComplexSpectrogram& x_t,
                                             const ComplexSpectrogram& y) const {
  x_t.require_same_shape(y, "tiny denoiser");
  const int F = x_t.bins();
  const int M = x_t.frames();
  Eigen::MatrixXd X(kLocalRows + 1, static_cast<Eigen::Index>(F) * M);
  for (int m = 0; m < M; ++m) {
    for (int f = 0; f < F; ++f) {
      const Eigen::Index p = static_cast<Eigen::Index>(m) * F + f;
      int k = 0;
      for (int dm = -1; dm <= 1; ++dm) {
        const int rm = reflect(m + dm, M);
        for (int df = -1; df <= 1; ++df, ++k) {
          const int rf = reflect(f + df, F);
          const cplx cx = x_t.at(rf, rm);
          const cplx cy = y.at(rf, rm);
          X(4 * k, p) = cx.real();
          X(4 * k + 1, p) = cx.imag();
          X(4 * k + 2, p) = cy.real();
          X(4 * k + 3, p) = cy.imag();
          X(36 + 2 * k, p) = magnitude(cx);
          X(36 + 2 * k + 1, p) = magnitude(cy);
        }
      }
      X(kLocalRows, p) = F > 1 ? static_cast<double>(f) / (F - 1) : 0.0;
    }
  }
  return X;
}

Eigen::MatrixXd TinyDenoiser::first_layer_local_weights() const {
  const LayerView& lv = layers_.front();
  Eigen::Map<const Eigen::MatrixXd> W(params_.data() + lv.weight_offset, lv.out, lv.in);
  Eigen::MatrixXd out(lv.out, kLocalRows + 1);
  out.leftCols(kLocalRows) = W.leftCols(kLocalRows);
  out.col(kLocalRows) = W.col(lv.in - 1);
  return out;
}

}  // namespace sbse
