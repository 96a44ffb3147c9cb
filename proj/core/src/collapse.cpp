#include "simscope/collapse.hpp"

#include <algorithm>

#include "simscope/error.hpp"

namespace simscope {
namespace {

SimilarityScore cka_or_zero(const ActivationMatrix& x, const ActivationMatrix& y) {
  try {
    return linear_cka(x, y);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerate) throw;
    return {0.0, Metric::kCka, x.n()};
  }
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kHealthy: return "HEALTHY";
    case Verdict::kPolarised: return "POLARISED";
    case Verdict::kCollapsed: return "COLLAPSED";
  }
  return "UNKNOWN";
}

std::vector<bool> passive_mask(const Vector& per_dim_kl, double threshold) {
  std::vector<bool> mask(static_cast<std::size_t>(per_dim_kl.size()));
  for (Eigen::Index j = 0; j < per_dim_kl.size(); ++j) {
    mask[static_cast<std::size_t>(j)] = per_dim_kl(j) < threshold;
  }
  return mask;
}

LatentProbes latent_similarity_probe(const ActivationMatrix& input,
                                     const ActivationMatrix& mean,
                                     const ActivationMatrix& sampled) {
  return {cka_or_zero(mean, sampled), cka_or_zero(input, sampled)};
}

LatentProbes latent_similarity_probe(const ForwardTrace& trace) {
  return latent_similarity_probe(ActivationMatrix(trace.input, "input"),
                                 ActivationMatrix(trace.stats.mean, "mean"),
                                 ActivationMatrix(trace.sampled, "sampled"));
}

std::size_t LatentDiagnosis::passive_count() const {
  return static_cast<std::size_t>(
      std::count(passive_mask.begin(), passive_mask.end(), true));
}

LatentDiagnosis diagnose(const Vector& per_dim_kl, const LatentProbes& probes,
                         double recon_loss, const Baselines& baselines,
                         const DiagnosisThresholds& thresholds) {
  if (!baselines.reconstruction) {
    throw Error(ErrorKind::kConfig, "diagnose: missing baseline reconstruction loss");
  }
  if (!(thresholds.passive_kl > 0.0)) {
    throw Error(ErrorKind::kConfig, "diagnose: passive threshold must be positive");
  }
  if ((per_dim_kl.array() < 0.0).any() || !per_dim_kl.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "diagnose: KL values must be finite and >= 0");
  }

  LatentDiagnosis out;
  out.per_dim_kl = per_dim_kl;
  out.passive_mask = passive_mask(per_dim_kl, thresholds.passive_kl);
  out.cka_mean_sampled = probes.cka_mean_sampled;
  out.cka_input_sampled = probes.cka_input_sampled;
  out.reconstruction = recon_loss;
  out.baseline_reconstruction = *baselines.reconstruction;

  const std::size_t passive = out.passive_count();
  const bool all_passive = passive == out.passive_mask.size();
  const bool similar = probes.cka_mean_sampled.value >= thresholds.mean_sampled_cka;
  const bool recon_ok =
      recon_loss <= thresholds.recon_factor * out.baseline_reconstruction;

  if (all_passive || (!similar && !recon_ok)) {
    out.verdict = Verdict::kCollapsed;
  } else if (passive > 0 && similar && recon_ok) {
    out.verdict = Verdict::kPolarised;
  } else {
    out.verdict = Verdict::kHealthy;
  }
  return out;
}

}  // namespace simscope
