#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "simscope/similarity.hpp"
#include "simscope/vae_model.hpp"

namespace simscope {

enum class Verdict { kHealthy, kPolarised, kCollapsed };

std::string_view to_string(Verdict verdict);

struct DiagnosisThresholds {
  double passive_kl = 0.01;       // nats; must be > 0
  double mean_sampled_cka = 0.5;  // T_ms
  double recon_factor = 1.5;      // tolerated recon loss vs. baseline
};

/// Dimension j is passive iff per_dim_kl[j] < threshold.
std::vector<bool> passive_mask(const Vector& per_dim_kl, double threshold = 0.01);

struct LatentProbes {
  SimilarityScore cka_mean_sampled;
  SimilarityScore cka_input_sampled;
};

/// CKA(mean, sampled) and CKA(input, sampled) over one evaluation batch.
/// A mean layer with no variation carries no information about the input,
/// so its probe is reported as 0 rather than raising kDegenerate.
LatentProbes latent_similarity_probe(const ActivationMatrix& input,
                                     const ActivationMatrix& mean,
                                     const ActivationMatrix& sampled);
LatentProbes latent_similarity_probe(const ForwardTrace& trace);

struct Baselines {
  std::optional<double> reconstruction;
};

struct LatentDiagnosis {
  Vector per_dim_kl;
  std::vector<bool> passive_mask;
  SimilarityScore cka_mean_sampled;
  SimilarityScore cka_input_sampled;
  double reconstruction = 0.0;
  double baseline_reconstruction = 0.0;
  Verdict verdict = Verdict::kHealthy;

  std::size_t passive_count() const;
};

/// COLLAPSED: every dimension passive, or cka(mean, sampled) < T_ms with
///            recon above recon_factor x baseline.
/// POLARISED: some dimension passive, cka(mean, sampled) >= T_ms and recon
///            within recon_factor x baseline.
/// HEALTHY:   otherwise.
LatentDiagnosis diagnose(const Vector& per_dim_kl, const LatentProbes& probes,
                         double recon_loss, const Baselines& baselines,
                         const DiagnosisThresholds& thresholds = {});

}  // namespace simscope
