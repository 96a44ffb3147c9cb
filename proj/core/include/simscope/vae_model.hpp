#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simscope/matrix.hpp"

namespace simscope {

/// Affine map applied to row-major batches: out = in * weight + bias.
/// `weight` is fan_in x fan_out.
struct DenseLayer {
  Matrix weight;
  Vector bias;

  Eigen::Index fan_in() const { return weight.rows(); }
  Eigen::Index fan_out() const { return weight.cols(); }
};

/// Fully-connected VAE layout: ReLU encoder, linear mean/log-variance heads,
/// tanh decoder, linear logit output.
struct Architecture {
  Eigen::Index input_dim = 64;
  std::vector<Eigen::Index> encoder_hidden{64, 64};
  Eigen::Index latent_dim = 10;
  std::vector<Eigen::Index> decoder_hidden{64, 64, 64};
};

/// Also used as the gradient container, since gradients share its shape.
struct ModelParams {
  std::vector<DenseLayer> encoder;
  DenseLayer mean_head;
  DenseLayer logvar_head;
  std::vector<DenseLayer> decoder;
  DenseLayer output;

  Eigen::Index input_dim() const;
  Eigen::Index latent_dim() const;
  Architecture architecture() const;

  /// Throws kContract if layer shapes do not chain or entries are non-finite.
  void validate() const;

  std::size_t parameter_count() const;
  Vector flatten() const;
  /// Inverse of flatten(); `values` must have parameter_count() entries.
  void assign(const Vector& values);

  /// Same shapes, all entries zero.
  ModelParams zeros_like() const;
};

/// Glorot-uniform weights, zero biases, deterministic in `seed`.
ModelParams initialize_params(const Architecture& arch, std::uint64_t seed);

inline constexpr double kLogvarMin = -30.0;
inline constexpr double kLogvarMax = 30.0;

struct LatentStats {
  Matrix mean;    // batch x latent_dim
  Matrix logvar;  // batch x latent_dim, clamped to [kLogvarMin, kLogvarMax]
};

struct EncodeResult {
  std::vector<Matrix> hidden;
  LatentStats stats;
  Matrix logvar_unclamped;
};

struct DecodeResult {
  std::vector<Matrix> hidden;
  Matrix logits;
};

EncodeResult encode(const ModelParams& params, const Matrix& batch);

/// z = mean + exp(0.5 * logvar) .* noise.
Matrix reparameterize(const LatentStats& stats, const Matrix& noise);

DecodeResult decode(const ModelParams& params, const Matrix& z);

/// Every activation of one forward pass, plus the noise used for sampling.
struct ForwardTrace {
  Matrix input;
  std::vector<Matrix> encoder_hidden;
  LatentStats stats;
  Matrix logvar_unclamped;
  Matrix noise;
  Matrix sampled;
  std::vector<Matrix> decoder_hidden;
  Matrix logits;

  Eigen::Index batch_size() const { return input.rows(); }

  /// input, encoder_1.., mean, logvar, sampled, decoder_1.., output.
  std::vector<std::string> layer_names() const;
  std::vector<ActivationMatrix> layers() const;
};

ForwardTrace forward(const ModelParams& params, const Matrix& batch,
                     const Matrix& noise);

std::vector<std::string> trace_layer_names(std::size_t encoder_layers,
                                           std::size_t decoder_layers);

}  // namespace simscope
