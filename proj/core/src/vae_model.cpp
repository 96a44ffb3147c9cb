#include "simscope/vae_model.hpp"

#include <cmath>
#include <random>

#include "simscope/error.hpp"

namespace simscope {
namespace {

Matrix affine(const Matrix& in, const DenseLayer& layer) {
  return (in * layer.weight).rowwise() + layer.bias.transpose();
}

DenseLayer glorot(Eigen::Index fan_in, Eigen::Index fan_out,
                  std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  DenseLayer layer{Matrix(fan_in, fan_out), Vector::Zero(fan_out)};
  for (Eigen::Index c = 0; c < fan_out; ++c) {
    for (Eigen::Index r = 0; r < fan_in; ++r) layer.weight(r, c) = dist(rng);
  }
  return layer;
}

template <typename Fn>
void for_each_layer(const ModelParams& p, Fn&& fn) {
  for (const auto& l : p.encoder) fn(l);
  fn(p.mean_head);
  fn(p.logvar_head);
  for (const auto& l : p.decoder) fn(l);
  fn(p.output);
}

template <typename Fn>
void for_each_layer(ModelParams& p, Fn&& fn) {
  for (auto& l : p.encoder) fn(l);
  fn(p.mean_head);
  fn(p.logvar_head);
  for (auto& l : p.decoder) fn(l);
  fn(p.output);
}

[[noreturn]] void shape_error(const std::string& what) {
  throw Error(ErrorKind::kShape, what);
}

}  // namespace

Eigen::Index ModelParams::input_dim() const {
  return encoder.empty() ? mean_head.fan_in() : encoder.front().fan_in();
}

Eigen::Index ModelParams::latent_dim() const { return mean_head.fan_out(); }

Architecture ModelParams::architecture() const {
  Architecture arch;
  arch.input_dim = input_dim();
  arch.latent_dim = latent_dim();
  arch.encoder_hidden.clear();
  arch.decoder_hidden.clear();
  for (const auto& l : encoder) arch.encoder_hidden.push_back(l.fan_out());
  for (const auto& l : decoder) arch.decoder_hidden.push_back(l.fan_out());
  return arch;
}

void ModelParams::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorKind::kContract, "model params: " + msg);
  };
  Eigen::Index width = input_dim();
  for (const auto& l : encoder) {
    if (l.fan_in() != width) fail("encoder layer does not chain");
    width = l.fan_out();
  }
  if (mean_head.fan_in() != width || logvar_head.fan_in() != width) {
    fail("latent heads do not match encoder width");
  }
  if (logvar_head.fan_out() != mean_head.fan_out()) {
    fail("mean and logvar heads differ in latent size");
  }
  width = latent_dim();
  for (const auto& l : decoder) {
    if (l.fan_in() != width) fail("decoder layer does not chain");
    width = l.fan_out();
  }
  if (output.fan_in() != width) fail("output layer does not match decoder");
  if (output.fan_out() != input_dim()) fail("output width differs from input");
  for_each_layer(*this, [&](const DenseLayer& l) {
    if (l.bias.size() != l.fan_out()) fail("bias size mismatch");
    if (!l.weight.allFinite() || !l.bias.allFinite()) fail("non-finite entries");
  });
}

std::size_t ModelParams::parameter_count() const {
  std::size_t count = 0;
  for_each_layer(*this, [&](const DenseLayer& l) {
    count += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  });
  return count;
}

Vector ModelParams::flatten() const {
  Vector out(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index offset = 0;
  for_each_layer(*this, [&](const DenseLayer& l) {
    out.segment(offset, l.weight.size()) = l.weight.reshaped();
    offset += l.weight.size();
    out.segment(offset, l.bias.size()) = l.bias;
    offset += l.bias.size();
  });
  return out;
}

void ModelParams::assign(const Vector& values) {
  if (values.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw Error(ErrorKind::kShape, "assign: parameter vector has wrong length");
  }
  Eigen::Index offset = 0;
  for_each_layer(*this, [&](DenseLayer& l) {
    l.weight.reshaped() = values.segment(offset, l.weight.size());
    offset += l.weight.size();
    l.bias = values.segment(offset, l.bias.size());
    offset += l.bias.size();
  });
}

ModelParams ModelParams::zeros_like() const {
  ModelParams out = *this;
  for_each_layer(out, [](DenseLayer& l) {
    l.weight.setZero();
    l.bias.setZero();
  });
  return out;
}

ModelParams initialize_params(const Architecture& arch, std::uint64_t seed) {
  if (arch.input_dim < 1 || arch.latent_dim < 1) {
    throw Error(ErrorKind::kConfig, "architecture: dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  ModelParams p;
  Eigen::Index width = arch.input_dim;
  for (Eigen::Index h : arch.encoder_hidden) {
    p.encoder.push_back(glorot(width, h, rng));
    width = h;
  }
  p.mean_head = glorot(width, arch.latent_dim, rng);
  p.logvar_head = glorot(width, arch.latent_dim, rng);
  width = arch.latent_dim;
  for (Eigen::Index h : arch.decoder_hidden) {
    p.decoder.push_back(glorot(width, h, rng));
    width = h;
  }
  p.output = glorot(width, arch.input_dim, rng);
  return p;
}

EncodeResult encode(const ModelParams& params, const Matrix& batch) {
  if (batch.cols() != params.input_dim()) {
    shape_error("encode: batch has " + std::to_string(batch.cols()) +
                " columns, model expects " + std::to_string(params.input_dim()));
  }
  EncodeResult out;
  const Matrix* current = &batch;
  for (const auto& layer : params.encoder) {
    out.hidden.push_back(affine(*current, layer).cwiseMax(0.0));
    current = &out.hidden.back();
  }
  out.stats.mean = affine(*current, params.mean_head);
  out.logvar_unclamped = affine(*current, params.logvar_head);
  out.stats.logvar = out.logvar_unclamped.cwiseMax(kLogvarMin).cwiseMin(kLogvarMax);
  return out;
}

Matrix reparameterize(const LatentStats& stats, const Matrix& noise) {
  if (noise.rows() != stats.mean.rows() || noise.cols() != stats.mean.cols() ||
      stats.logvar.rows() != stats.mean.rows() ||
      stats.logvar.cols() != stats.mean.cols()) {
    shape_error("reparameterize: noise and latent stats differ in shape");
  }
  return stats.mean.array() + (0.5 * stats.logvar.array()).exp() * noise.array();
}

DecodeResult decode(const ModelParams& params, const Matrix& z) {
  if (z.cols() != params.latent_dim()) {
    shape_error("decode: latent batch has " + std::to_string(z.cols()) +
                " columns, model expects " + std::to_string(params.latent_dim()));
  }
  DecodeResult out;
  const Matrix* current = &z;
  for (const auto& layer : params.decoder) {
    out.hidden.push_back(affine(*current, layer).array().tanh().matrix());
    current = &out.hidden.back();
  }
  out.logits = affine(*current, params.output);
  return out;
}

ForwardTrace forward(const ModelParams& params, const Matrix& batch,
                     const Matrix& noise) {
  EncodeResult enc = encode(params, batch);
  ForwardTrace trace;
  trace.input = batch;
  trace.sampled = reparameterize(enc.stats, noise);
  trace.noise = noise;
  trace.encoder_hidden = std::move(enc.hidden);
  trace.stats = std::move(enc.stats);
  trace.logvar_unclamped = std::move(enc.logvar_unclamped);
  DecodeResult dec = decode(params, trace.sampled);
  trace.decoder_hidden = std::move(dec.hidden);
  trace.logits = std::move(dec.logits);
  return trace;
}

std::vector<std::string> trace_layer_names(std::size_t encoder_layers,
                                           std::size_t decoder_layers) {
  std::vector<std::string> names{"input"};
  for (std::size_t i = 1; i <= encoder_layers; ++i) {
    names.push_back("encoder_" + std::to_string(i));
  }
  names.insert(names.end(), {"mean", "logvar", "sampled"});
  for (std::size_t i = 1; i <= decoder_layers; ++i) {
    names.push_back("decoder_" + std::to_string(i));
  }
  names.push_back("output");
  return names;
}

std::vector<std::string> ForwardTrace::layer_names() const {
  return trace_layer_names(encoder_hidden.size(), decoder_hidden.size());
}

std::vector<ActivationMatrix> ForwardTrace::layers() const {
  const auto names = layer_names();
  std::vector<ActivationMatrix> out;
  out.reserve(names.size());
  std::size_t k = 0;
  out.emplace_back(input, names[k++]);
  for (const auto& h : encoder_hidden) out.emplace_back(h, names[k++]);
  out.emplace_back(stats.mean, names[k++]);
  out.emplace_back(stats.logvar, names[k++]);
  out.emplace_back(sampled, names[k++]);
  for (const auto& h : decoder_hidden) out.emplace_back(h, names[k++]);
  out.emplace_back(logits, names[k++]);
  return out;
}

}  // namespace simscope
