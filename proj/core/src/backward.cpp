#include "simscope/backward.hpp"

#include <cmath>
#include <numbers>

#include "simscope/error.hpp"

namespace simscope {
namespace {

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

void check_trace(const ModelParams& params, const ForwardTrace& trace,
                 const Matrix& targets) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorKind::kContract, "backward: stale trace: " + msg);
  };
  const Eigen::Index m = trace.batch_size();
  if (trace.encoder_hidden.size() != params.encoder.size() ||
      trace.decoder_hidden.size() != params.decoder.size()) {
    fail("layer count differs from params");
  }
  for (std::size_t i = 0; i < params.encoder.size(); ++i) {
    if (trace.encoder_hidden[i].rows() != m ||
        trace.encoder_hidden[i].cols() != params.encoder[i].fan_out()) {
      fail("encoder activation shape");
    }
  }
  for (std::size_t i = 0; i < params.decoder.size(); ++i) {
    if (trace.decoder_hidden[i].rows() != m ||
        trace.decoder_hidden[i].cols() != params.decoder[i].fan_out()) {
      fail("decoder activation shape");
    }
  }
  const Eigen::Index d = params.latent_dim();
  for (const Matrix* latent :
       {&trace.stats.mean, &trace.stats.logvar, &trace.logvar_unclamped,
        &trace.noise, &trace.sampled}) {
    if (latent->rows() != m || latent->cols() != d) fail("latent shape");
  }
  if (trace.input.cols() != params.input_dim() ||
      trace.logits.rows() != m || trace.logits.cols() != params.input_dim()) {
    fail("input/output shape");
  }
  if (targets.rows() != m || targets.cols() != params.input_dim()) {
    throw Error(ErrorKind::kShape, "backward: targets shape mismatch");
  }
}

// Accumulates gradients of the minibatch total-correlation estimate.
// d_z: w.r.t. the samples; d_mu / d_logvar: w.r.t. the mixture components.
void total_correlation_grad(const Matrix& z, const LatentStats& stats,
                            double weight, Matrix& d_z, Matrix& d_mu,
                            Matrix& d_logvar) {
  const Eigen::Index m = z.rows();
  const Eigen::Index d = z.cols();
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Eigen::ArrayXXd inv_var = (-stats.logvar.array()).exp();

  std::vector<Eigen::ArrayXXd> per_dim(static_cast<std::size_t>(d),
                                       Eigen::ArrayXXd(m, m));
  Eigen::ArrayXXd joint = Eigen::ArrayXXd::Zero(m, m);
  for (Eigen::Index k = 0; k < d; ++k) {
    auto& l = per_dim[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double diff = z(i, k) - stats.mean(j, k);
        l(i, j) = -half_log_2pi - 0.5 * stats.logvar(j, k) -
                  0.5 * diff * diff * inv_var(j, k);
      }
    }
    joint += l;
  }

  auto row_softmax = [](const Eigen::ArrayXXd& a) {
    Eigen::ArrayXXd w(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double peak = a.row(i).maxCoeff();
      w.row(i) = (a.row(i) - peak).exp();
      w.row(i) /= w.row(i).sum();
    }
    return w;
  };

  const Eigen::ArrayXXd w_joint = row_softmax(joint);
  const double scale = weight / static_cast<double>(m);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::ArrayXXd coef =
        scale * (w_joint - row_softmax(per_dim[static_cast<std::size_t>(k)]));
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double diff = z(i, k) - stats.mean(j, k);
        const double c = coef(i, j);
        const double g = diff * inv_var(j, k);
        d_z(i, k) -= c * g;
        d_mu(j, k) += c * g;
        d_logvar(j, k) += c * (0.5 * diff * g - 0.5);
      }
    }
  }
}

void dense_backward(const Matrix& in, const DenseLayer& layer,
                    const Matrix& d_out, DenseLayer& grad, Matrix* d_in) {
  grad.weight.noalias() = in.transpose() * d_out;
  grad.bias = d_out.colwise().sum().transpose();
  if (d_in != nullptr) d_in->noalias() = d_out * layer.weight.transpose();
}

}  // namespace

ModelParams backward(const ModelParams& params, const ForwardTrace& trace,
                     const Matrix& targets, const ObjectiveConfig& cfg,
                     std::int64_t step) {
  validate(cfg);
  check_trace(params, trace, targets);
  const Eigen::Index m = trace.batch_size();
  const double inv_m = 1.0 / static_cast<double>(m);
  ModelParams grads = params.zeros_like();

  // Reconstruction: d/do [softplus(o) - t o] = sigmoid(o) - t.
  Matrix d_act = trace.logits.unaryExpr(&sigmoid);
  d_act = (d_act - targets) * inv_m;

  const std::size_t n_dec = params.decoder.size();
  const Matrix& last_dec = n_dec > 0 ? trace.decoder_hidden.back() : trace.sampled;
  Matrix d_in;
  dense_backward(last_dec, params.output, d_act, grads.output, &d_in);
  for (std::size_t idx = n_dec; idx-- > 0;) {
    const Matrix& h = trace.decoder_hidden[idx];
    d_act = d_in.array() * (1.0 - h.array().square());
    const Matrix& in = idx > 0 ? trace.decoder_hidden[idx - 1] : trace.sampled;
    dense_backward(in, params.decoder[idx], d_act, grads.decoder[idx], &d_in);
  }
  Matrix d_z = std::move(d_in);

  const auto& mu = trace.stats.mean;
  const auto& logvar = trace.stats.logvar;
  Matrix d_mu = Matrix::Zero(m, mu.cols());
  Matrix d_logvar = Matrix::Zero(m, mu.cols());

  double kl_weight = 1.0;
  switch (cfg.kind) {
    case ObjectiveKind::kBetaVae:
      kl_weight = cfg.beta;
      break;
    case ObjectiveKind::kAnnealedVae: {
      const double kl = kl_gaussian_per_dim(trace.stats).sum();
      const double gap = kl - capacity_schedule(step, cfg);
      kl_weight = cfg.gamma * static_cast<double>((gap > 0.0) - (gap < 0.0));
      break;
    }
    case ObjectiveKind::kBetaTcVae:
      total_correlation_grad(trace.sampled, trace.stats, cfg.beta - 1.0, d_z,
                             d_mu, d_logvar);
      break;
    case ObjectiveKind::kDipVaeII: {
      const Matrix cov = dip_covariance(trace.stats);
      Matrix g = 2.0 * cfg.lambda_od * cov;
      g.diagonal() = 2.0 * cfg.lambda_d * (cov.diagonal().array() - 1.0);
      const Matrix centered = mu.rowwise() - mu.colwise().mean();
      d_mu += 2.0 * inv_m * centered * g;
      d_logvar += inv_m * (logvar.array().exp().rowwise() *
                           g.diagonal().transpose().array())
                              .matrix();
      break;
    }
  }

  // KL term: 0.5 (mu^2 + e^lv - 1 - lv), batch mean.
  d_mu += kl_weight * inv_m * mu;
  d_logvar += kl_weight * inv_m * 0.5 * (logvar.array().exp() - 1.0).matrix();

  // Reparameterization z = mu + exp(lv / 2) eps.
  d_mu += d_z;
  d_logvar += (d_z.array() * 0.5 * (0.5 * logvar.array()).exp() *
                trace.noise.array())
                  .matrix();

  const Matrix inside_clamp =
      ((trace.logvar_unclamped.array() >= kLogvarMin) &&
       (trace.logvar_unclamped.array() <= kLogvarMax))
          .cast<double>()
          .matrix();
  d_logvar = d_logvar.cwiseProduct(inside_clamp);

  const std::size_t n_enc = params.encoder.size();
  const Matrix& last_enc = n_enc > 0 ? trace.encoder_hidden.back() : trace.input;
  Matrix d_from_mean;
  Matrix d_from_logvar;
  dense_backward(last_enc, params.mean_head, d_mu, grads.mean_head, &d_from_mean);
  dense_backward(last_enc, params.logvar_head, d_logvar, grads.logvar_head,
                 &d_from_logvar);
  d_in = d_from_mean + d_from_logvar;
  for (std::size_t idx = n_enc; idx-- > 0;) {
    const Matrix& h = trace.encoder_hidden[idx];
    d_act = d_in.cwiseProduct((h.array() > 0.0).cast<double>().matrix());
    const Matrix& in = idx > 0 ? trace.encoder_hidden[idx - 1] : trace.input;
    dense_backward(in, params.encoder[idx], d_act, grads.encoder[idx],
                   idx > 0 ? &d_in : nullptr);
  }
  return grads;
}

}  // namespace simscope
