// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "sbse/denoiser.hpp"

namespace sbse {

struct TinyDenoiserConfig {
  std::vector<int> hidden = {64, 64};
  /// Number of sinusoidal time features (sin/cos pairs, so even).
  int time_features = 16;
  /// Seed of the weight initialization.
  std::uint64_t init_seed = 0;

  /// 3x3 patch of (x_t, y) real/imag parts (36), the patch magnitudes (18),
  /// the time features and the normalized bin position.
  int input_dim() const { return 36 + 18 + time_features + 1; }
  static constexpr int kOutputDim = 4;

  void validate() const;
  bool operator==(const TinyDenoiserConfig&) const = default;
};

/// Small per-bin MLP standing in for a full U-Net backbone.
///
/// Every time-frequency position is processed independently from its 3x3
/// neighbourhood (reflect padding at the grid edges). The network emits two
/// complex gains, and the estimate is
///   x_hat = (o0 + j o1) * y + (o2 + j o3) * x_t
/// at the centre bin. Hidden activations are SiLU. Parameters are stored in
/// one flat vector: for each layer the weight matrix (column-major, out x in)
/// followed by the bias.
class TinyDenoiser final : public Denoiser {
 public:
  explicit TinyDenoiser(TinyDenoiserConfig cfg);
  TinyDenoiser(TinyDenoiserConfig cfg, std::vector<double> params);

  const TinyDenoiserConfig& config() const { return cfg_; }
  std::size_t num_parameters() const { return params_.size(); }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }

  ComplexSpectrogram estimate(const ComplexSpectrogram& x_t, const ComplexSpectrogram& y,
                              double t) const override;

  /// Intermediate values kept by forward() for backward().
  struct Cache {
    ComplexSpectrogram x_t;
    ComplexSpectrogram y;
    std::vector<Eigen::MatrixXd> pre;   // pre-activations of the hidden layers
    Eigen::VectorXd time;               // time features
    /// post[0] = local features and bin position, post[l+1] = SiLU(pre[l]).
    std::vector<Eigen::MatrixXd> post;
    Eigen::MatrixXd out;                // kOutputDim x positions
  };

  ComplexSpectrogram forward(const ComplexSpectrogram& x_t, const ComplexSpectrogram& y, double t,
                             Cache* cache) const;

  /// Accumulates dL/dparams into `grad` given dL/dRe(x_hat) + j dL/dIm(x_hat).
  void backward(const Cache& cache, const ComplexSpectrogram& grad_estimate,
                std::span<double> grad) const;

  /// Feature matrix (input_dim x bins*frames), column p = frame * bins + bin.
  Eigen::MatrixXd features(const ComplexSpectrogram& x_t, const ComplexSpectrogram& y,
                           double t) const;

 private:
  struct LayerView {
    std::size_t weight_offset;
    std::size_t bias_offset;
    int in;
    int out;
  };
  static constexpr int kLocalRows = 54;

  void build_layout();
  Eigen::VectorXd time_features(double t) const;
  Eigen::MatrixXd local_features(const ComplexSpectrogram& x_t, const ComplexSpectrogram& y) const;
  Eigen::MatrixXd first_layer_local_weights() const;

  TinyDenoiserConfig cfg_;
  std::vector<LayerView> layers_;
  std::vector<double> params_;
};

}  // namespace sbse
