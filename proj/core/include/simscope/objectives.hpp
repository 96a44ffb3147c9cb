#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "simscope/vae_model.hpp"

namespace simscope {

enum class ObjectiveKind { kBetaVae, kAnnealedVae, kBetaTcVae, kDipVaeII };

/// "beta_vae", "annealed_vae", "beta_tc_vae", "dip_vae_ii".
std::string_view to_string(ObjectiveKind kind);
ObjectiveKind parse_objective(std::string_view text);

/// Hyperparameters of all four objectives; each kind reads only its own.
struct ObjectiveConfig {
  ObjectiveKind kind = ObjectiveKind::kBetaVae;
  double beta = 1.0;                           // beta-VAE, beta-TC VAE
  double gamma = 1000.0;                       // annealed
  double c_max = 5.0;                          // annealed
  std::int64_t iteration_threshold = 100000;   // annealed
  double lambda_od = 1.0;                      // DIP-VAE II
  double lambda_d = 1.0;                       // DIP-VAE II
  std::int64_t dataset_size = 0;               // beta-TC VAE (N)

  /// The knob swept as "regularisation strength" for this kind.
  double regularisation() const;
  /// Sets the swept knob (lambda_d follows lambda_od for DIP-VAE II).
  void set_regularisation(double value);
};

/// Throws kConfig when a field read by `cfg.kind` is out of range.
void validate(const ObjectiveConfig& cfg);

/// Batch mean of per-example summed binary cross-entropy, from logits.
double bernoulli_recon_loss(const Matrix& logits, const Matrix& targets);

/// Batch-averaged KL(q(z_j|x) || N(0,1)) per latent dimension.
Vector kl_gaussian_per_dim(const LatentStats& stats);

/// Linear capacity ramp C_max * min(1, step / iteration_threshold).
double capacity_schedule(std::int64_t step, const ObjectiveConfig& cfg);

/// Minibatch-weighted estimates of E[log q(z)] and E[sum_j log q(z_j)].
struct TcTerms {
  double log_qz = 0.0;
  double log_prod_qzj = 0.0;
  double total_correlation() const { return log_qz - log_prod_qzj; }
};

TcTerms tc_minibatch_log_qz(const Matrix& z, const LatentStats& stats,
                            std::int64_t dataset_size);

/// Cov[mean] (population) + E[diag(exp(logvar))].
Matrix dip_covariance(const LatentStats& stats);

struct LossBreakdown {
  double reconstruction = 0.0;
  double kl = 0.0;
  double penalty = 0.0;  // everything added on top of reconstruction
  double total = 0.0;
  std::optional<double> capacity;
  std::optional<double> total_correlation;
  std::optional<double> dip_off_diagonal;
  std::optional<double> dip_diagonal;
};

/// Minimization-form loss of one forward trace.
LossBreakdown objective_loss(const ForwardTrace& trace, const Matrix& targets,
                             const ObjectiveConfig& cfg, std::int64_t step);

/// recon + KL on a trace: the single-sample negative ELBO.
double negative_elbo(const ForwardTrace& trace, const Matrix& targets);

}  // namespace simscope
