#include "simscope/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "simscope/error.hpp"

namespace simscope {
namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void require_finite_stats(const LatentStats& stats, const char* what) {
  if (!stats.mean.allFinite() || !stats.logvar.allFinite()) {
    throw Error(ErrorKind::kInvalidInput,
                std::string(what) + ": non-finite latent statistics");
  }
  if (stats.mean.rows() != stats.logvar.rows() ||
      stats.mean.cols() != stats.logvar.cols()) {
    throw Error(ErrorKind::kShape,
                std::string(what) + ": mean and logvar differ in shape");
  }
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kBetaVae: return "beta_vae";
    case ObjectiveKind::kAnnealedVae: return "annealed_vae";
    case ObjectiveKind::kBetaTcVae: return "beta_tc_vae";
    case ObjectiveKind::kDipVaeII: return "dip_vae_ii";
  }
  return "unknown";
}

ObjectiveKind parse_objective(std::string_view text) {
  for (auto kind : {ObjectiveKind::kBetaVae, ObjectiveKind::kAnnealedVae,
                    ObjectiveKind::kBetaTcVae, ObjectiveKind::kDipVaeII}) {
    if (text == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::kConfig, "unknown objective '" + std::string(text) + "'");
}

double ObjectiveConfig::regularisation() const {
  switch (kind) {
    case ObjectiveKind::kBetaVae:
    case ObjectiveKind::kBetaTcVae: return beta;
    case ObjectiveKind::kAnnealedVae: return c_max;
    case ObjectiveKind::kDipVaeII: return lambda_od;
  }
  return 0.0;
}

void ObjectiveConfig::set_regularisation(double value) {
  switch (kind) {
    case ObjectiveKind::kBetaVae:
    case ObjectiveKind::kBetaTcVae: beta = value; break;
    case ObjectiveKind::kAnnealedVae: c_max = value; break;
    case ObjectiveKind::kDipVaeII: lambda_od = lambda_d = value; break;
  }
}

void validate(const ObjectiveConfig& cfg) {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw Error(ErrorKind::kConfig, msg);
  };
  switch (cfg.kind) {
    case ObjectiveKind::kBetaVae:
    case ObjectiveKind::kBetaTcVae:
      require(cfg.beta >= 1.0 && std::isfinite(cfg.beta), "beta must be >= 1");
      require(cfg.dataset_size >= 0, "dataset size must be nonnegative");
      break;
    case ObjectiveKind::kAnnealedVae:
      require(cfg.gamma >= 0.0 && std::isfinite(cfg.gamma), "gamma must be >= 0");
      require(cfg.c_max >= 0.0 && std::isfinite(cfg.c_max), "c_max must be >= 0");
      require(cfg.iteration_threshold >= 0, "iteration threshold must be >= 0");
      break;
    case ObjectiveKind::kDipVaeII:
      require(cfg.lambda_od >= 0.0 && cfg.lambda_d >= 0.0 &&
                  std::isfinite(cfg.lambda_od) && std::isfinite(cfg.lambda_d),
              "DIP-VAE lambdas must be >= 0");
      break;
  }
}

double bernoulli_recon_loss(const Matrix& logits, const Matrix& targets) {
  if (logits.rows() != targets.rows() || logits.cols() != targets.cols()) {
    throw Error(ErrorKind::kShape, "bernoulli_recon_loss: shape mismatch");
  }
  if ((targets.array() < 0.0).any() || (targets.array() > 1.0).any() ||
      !targets.allFinite()) {
    throw Error(ErrorKind::kInvalidInput,
                "bernoulli_recon_loss: targets must lie in [0, 1]");
  }
  // BCE(o, t) = softplus(o) - t * o
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      total += softplus(logits(r, c)) - targets(r, c) * logits(r, c);
    }
  }
  return total / static_cast<double>(logits.rows());
}

Vector kl_gaussian_per_dim(const LatentStats& stats) {
  require_finite_stats(stats, "kl_gaussian_per_dim");
  const auto& mu = stats.mean.array();
  const auto& lv = stats.logvar.array();
  const Eigen::ArrayXXd per_entry = 0.5 * (mu.square() + lv.exp() - 1.0 - lv);
  return per_entry.colwise().mean().transpose().matrix();
}

double capacity_schedule(std::int64_t step, const ObjectiveConfig& cfg) {
  if (cfg.iteration_threshold <= 0) return cfg.c_max;
  const double fraction =
      std::min(1.0, static_cast<double>(std::max<std::int64_t>(step, 0)) /
                        static_cast<double>(cfg.iteration_threshold));
  return cfg.c_max * fraction;
}

TcTerms tc_minibatch_log_qz(const Matrix& z, const LatentStats& stats,
                            std::int64_t dataset_size) {
  require_finite_stats(stats, "tc_minibatch_log_qz");
  const Eigen::Index m = z.rows();
  const Eigen::Index d = z.cols();
  if (m < 1 || stats.mean.rows() != m || stats.mean.cols() != d) {
    throw Error(ErrorKind::kShape,
                "tc_minibatch_log_qz: samples and latent stats differ in shape");
  }
  if (dataset_size < m) {
    throw Error(ErrorKind::kConfig,
                "tc_minibatch_log_qz: dataset size N=" +
                    std::to_string(dataset_size) + " smaller than batch M=" +
                    std::to_string(m));
  }
  const double log_nm =
      std::log(static_cast<double>(dataset_size) * static_cast<double>(m));
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Eigen::ArrayXXd inv_var = (-stats.logvar.array()).exp();

  // density[j](i, k) = log N(z_ik | mu_jk, var_jk)
  Eigen::ArrayXXd joint(m, m);  // (i, j): sum over k
  std::vector<Eigen::ArrayXXd> per_dim(static_cast<std::size_t>(d),
                                       Eigen::ArrayXXd(m, m));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double sum = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = z(i, k) - stats.mean(j, k);
        const double l = -half_log_2pi - 0.5 * stats.logvar(j, k) -
                         0.5 * diff * diff * inv_var(j, k);
        per_dim[static_cast<std::size_t>(k)](i, j) = l;
        sum += l;
      }
      joint(i, j) = sum;
    }
  }

  auto logsumexp_row = [](const Eigen::ArrayXXd& a, Eigen::Index row) {
    const double peak = a.row(row).maxCoeff();
    return peak + std::log((a.row(row) - peak).exp().sum());
  };

  TcTerms out;
  for (Eigen::Index i = 0; i < m; ++i) {
    out.log_qz += logsumexp_row(joint, i) - log_nm;
    for (Eigen::Index k = 0; k < d; ++k) {
      out.log_prod_qzj +=
          logsumexp_row(per_dim[static_cast<std::size_t>(k)], i) - log_nm;
    }
  }
  out.log_qz /= static_cast<double>(m);
  out.log_prod_qzj /= static_cast<double>(m);
  return out;
}

Matrix dip_covariance(const LatentStats& stats) {
  require_finite_stats(stats, "dip_covariance");
  const Eigen::Index m = stats.mean.rows();
  if (m < 2) {
    throw Error(ErrorKind::kInvalidInput,
                "dip_covariance: need at least 2 examples, got " +
                    std::to_string(m));
  }
  const Matrix centered = stats.mean.rowwise() - stats.mean.colwise().mean();
  Matrix cov = centered.transpose() * centered / static_cast<double>(m);
  const Vector mean_var =
      stats.logvar.array().exp().colwise().mean().transpose().matrix();
  cov.diagonal() += mean_var;
  return cov;
}

LossBreakdown objective_loss(const ForwardTrace& trace, const Matrix& targets,
                             const ObjectiveConfig& cfg, std::int64_t step) {
  validate(cfg);
  LossBreakdown out;
  out.reconstruction = bernoulli_recon_loss(trace.logits, targets);
  out.kl = kl_gaussian_per_dim(trace.stats).sum();
  switch (cfg.kind) {
    case ObjectiveKind::kBetaVae:
      out.penalty = cfg.beta * out.kl;
      break;
    case ObjectiveKind::kAnnealedVae: {
      const double c = capacity_schedule(step, cfg);
      out.capacity = c;
      out.penalty = cfg.gamma * std::abs(out.kl - c);
      break;
    }
    case ObjectiveKind::kBetaTcVae: {
      const std::int64_t n =
          cfg.dataset_size > 0 ? cfg.dataset_size : trace.batch_size();
      const double tc =
          tc_minibatch_log_qz(trace.sampled, trace.stats, n).total_correlation();
      out.total_correlation = tc;
      out.penalty = out.kl + (cfg.beta - 1.0) * tc;
      break;
    }
    case ObjectiveKind::kDipVaeII: {
      const Matrix cov = dip_covariance(trace.stats);
      const double diag = (cov.diagonal().array() - 1.0).square().sum();
      const double off = cov.squaredNorm() - cov.diagonal().squaredNorm();
      out.dip_diagonal = diag;
      out.dip_off_diagonal = off;
      out.penalty = out.kl + cfg.lambda_od * off + cfg.lambda_d * diag;
      break;
    }
  }
  out.total = out.reconstruction + out.penalty;
  return out;
}

double negative_elbo(const ForwardTrace& trace, const Matrix& targets) {
  return bernoulli_recon_loss(trace.logits, targets) +
         kl_gaussian_per_dim(trace.stats).sum();
}

}  // namespace simscope
