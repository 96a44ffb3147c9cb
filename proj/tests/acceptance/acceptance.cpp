// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "simscope/activation_io.hpp"
#include "simscope/backward.hpp"
#include "simscope/experiment.hpp"
#include "simscope/pipeline.hpp"
#include "simscope/similarity.hpp"
#include "simscope/synthetic.hpp"
#include "support.hpp"

namespace {

using namespace simscope;
using simscope::testing::gaussian_matrix;
using simscope::testing::random_orthogonal;
using simscope::testing::reference_singular_values;
using simscope::testing::TempDir;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> failures;
  std::string summary;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

bool report(int number, const std::string& title, double limit_seconds,
            const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.failures.push_back(std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_seconds > 0) {
    o.check(seconds <= limit_seconds,
            "runtime " + fmt(seconds) + "s exceeds " + fmt(limit_seconds) + "s");
  }
  std::printf("%s criterion %d: %s [%s] (%.1fs)\n", o.pass ? "PASS" : "FAIL", number,
              title.c_str(), o.summary.c_str(), seconds);
  for (const auto& f : o.failures) std::printf("    - %s\n", f.c_str());
  std::fflush(stdout);
  return o.pass;
}

// ---------------------------------------------------------------- 1

Outcome synthetic_reproduction() {
  Outcome o;
  const auto rows = synthetic_benchmark(50, kDefaultNSweep, 0);
  std::map<std::string, SyntheticRow> at5000;
  for (const auto& r : rows)
    if (r.n == 5000) at5000[r.pair] = r;
  const double ab = at5000.at("A-B").cka, ac = at5000.at("A-C").cka, ad = at5000.at("A-D").cka;
  const double gap = at5000.at("A-D").procrustes - ad;
  o.check(ab >= 0.7 && ab <= 0.9, "CKA(A,B)=" + fmt(ab) + " outside [0.7, 0.9]");
  o.check(ac >= 0.4 && ac <= 0.6, "CKA(A,C)=" + fmt(ac) + " outside [0.4, 0.6]");
  o.check(ad <= 0.1, "CKA(A,D)=" + fmt(ad) + " above 0.1");
  o.check(gap >= 0.1, "P_s(A,D) - CKA(A,D)=" + fmt(gap) + " below 0.1");
  o.check(ab > ac && ac > ad, "ordering CKA(A,B) > CKA(A,C) > CKA(A,D) violated");
  o.summary = "A-B " + fmt(ab) + ", A-C " + fmt(ac) + ", A-D " + fmt(ad) + ", P_s-CKA on A-D " +
              fmt(gap);
  return o;
}

// ---------------------------------------------------------------- 2

Outcome metric_properties() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Eigen::Index> pick_n(10, 2000), pick_p(2, 100);
  std::uniform_real_distribution<double> pick_scale(0.05, 20.0), pick_mix(0.0, 1.0);
  double worst_sym = 0, worst_orth = 0, worst_scale = 0, worst_self = 0, worst_nuc = 0;
  bool bounds_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = pick_n(rng), px = pick_p(rng), py = pick_p(rng);
    const std::uint64_t seed = rng();
    const Matrix x = gaussian_matrix(n, px, seed);
    // Partially shared structure so scores spread over [0, 1].
    const Matrix y = pick_mix(rng) * x * gaussian_matrix(px, py, seed + 1) +
                     gaussian_matrix(n, py, seed + 2);
    const ActivationMatrix ax(x, "x"), ay(y, "y");
    const ActivationMatrix rx(x * random_orthogonal(px, seed + 3), "x"),
        ry(y * random_orthogonal(py, seed + 4), "y");
    const ActivationMatrix sx(pick_scale(rng) * x, "x"), sy(pick_scale(rng) * y, "y");

    for (Metric m : {Metric::kCka, Metric::kProcrustes, Metric::kConservative}) {
      const double v = score(ax, ay, m).value;
      worst_sym = std::max(worst_sym, std::abs(v - score(ay, ax, m).value));
      worst_orth = std::max(worst_orth, std::abs(v - score(rx, ry, m).value));
      worst_scale = std::max(worst_scale, std::abs(v - score(sx, sy, m).value));
      worst_self = std::max(worst_self, std::abs(1.0 - score(ax, ax, m).value));
      bounds_ok = bounds_ok && v >= 0.0 && v <= 1.0;
    }
    const ActivationMatrix nx = procrustes_normalize(ax), ny = procrustes_normalize(ay);
    const double pd = procrustes_distance(nx, ny).value;
    worst_sym = std::max(worst_sym, std::abs(pd - procrustes_distance(ny, nx).value));
    bounds_ok = bounds_ok && pd >= 0.0 && pd <= 2.0;

    const Matrix cross = ny.data().transpose() * nx.data();
    const double reference = reference_singular_values(cross).sum();
    worst_nuc = std::max(worst_nuc, std::abs(nuclear_norm(cross) - reference) / reference);
  }
  o.check(worst_sym <= 1e-9, "symmetry error " + fmt(worst_sym));
  o.check(worst_orth <= 1e-8, "orthogonal invariance error " + fmt(worst_orth));
  o.check(worst_scale <= 1e-8, "isotropic scale invariance error " + fmt(worst_scale));
  o.check(worst_self <= 1e-9, "self-similarity error " + fmt(worst_self));
  o.check(bounds_ok, "a score left its bounds");
  o.check(worst_nuc <= 1e-8, "nuclear norm relative error " + fmt(worst_nuc));
  o.summary = "100 pairs; worst sym " + fmt(worst_sym, 2) + ", orth " + fmt(worst_orth, 2) +
              ", scale " + fmt(worst_scale, 2) + ", self " + fmt(worst_self, 2) + ", nuclear " +
              fmt(worst_nuc, 2);
  return o;
}

// ---------------------------------------------------------------- 3

double log_normal_pdf(double z, double mu, double logvar) {
  return -0.5 * (std::log(2.0 * std::numbers::pi) + logvar +
                 (z - mu) * (z - mu) / std::exp(logvar));
}

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

double worst_gradient_error(ObjectiveKind kind) {
  ObjectiveConfig cfg;
  cfg.kind = kind;
  cfg.beta = 4.0;
  cfg.gamma = 2.0;
  cfg.c_max = 1.0;
  cfg.iteration_threshold = 10;
  cfg.dataset_size = 10;
  cfg.lambda_od = 3.0;
  cfg.lambda_d = 2.0;
  Architecture arch;
  arch.input_dim = 4;
  arch.encoder_hidden = {5};
  arch.latent_dim = 2;
  arch.decoder_hidden = {5};
  const std::int64_t step = 4;
  const double h = 1e-5;
  double worst = 0.0;
  for (std::uint64_t restart = 0; restart < 10; ++restart) {
    const ModelParams p = initialize_params(arch, 500 + restart);
    const Matrix x = uniform_matrix(3, 4, 0.0, 1.0, 600 + restart);
    const Matrix eps = gaussian_matrix(3, 2, 700 + restart);
    const Vector analytic = backward(p, forward(p, x, eps), x, cfg, step).flatten();
    const Vector theta = p.flatten();
    ModelParams q = p;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Vector t = theta;
      t(i) += h;
      q.assign(t);
      const double up = objective_loss(forward(q, x, eps), x, cfg, step).total;
      t(i) -= 2.0 * h;
      q.assign(t);
      const double down = objective_loss(forward(q, x, eps), x, cfg, step).total;
      const double numeric = (up - down) / (2.0 * h);
      const double scale = std::max({std::abs(numeric), std::abs(analytic(i)), 1e-4});
      worst = std::max(worst, std::abs(numeric - analytic(i)) / scale);
    }
  }
  return worst;
}

Outcome loss_and_gradients() {
  Outcome o;
  std::string summary;
  for (ObjectiveKind k : {ObjectiveKind::kBetaVae, ObjectiveKind::kAnnealedVae,
                          ObjectiveKind::kBetaTcVae, ObjectiveKind::kDipVaeII}) {
    const double err = worst_gradient_error(k);
    o.check(err <= 1e-4, std::string(to_string(k)) + " gradient relative error " + fmt(err));
    summary += std::string(to_string(k)) + " " + fmt(err, 2) + "; ";
  }

  // Closed-form KL against Monte-Carlo.
  {
    const LatentStats s{uniform_matrix(6, 3, -2, 2, 31), uniform_matrix(6, 3, -2, 2, 32)};
    const Vector closed = kl_gaussian_per_dim(s);
    std::mt19937_64 rng(33);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < 3; ++j) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < 6; ++i) {
        const double mu = s.mean(i, j), lv = s.logvar(i, j);
        double acc = 0.0;
        const int draws = 100000;
        for (int k = 0; k < draws; ++k) {
          const double z = mu + std::exp(0.5 * lv) * normal(rng);
          acc += log_normal_pdf(z, mu, lv) - log_normal_pdf(z, 0.0, 0.0);
        }
        total += acc / draws;
      }
      worst = std::max(worst, std::abs(total / 6.0 - closed(j)) / closed(j));
    }
    o.check(worst <= 0.02, "KL Monte-Carlo relative error " + fmt(worst));
    summary += "KL MC " + fmt(worst, 2) + "; ";
  }

  // DIP covariance against the Monte-Carlo covariance of the mixture.
  {
    const Eigen::Index m = 6, d = 3;
    const LatentStats s{gaussian_matrix(m, d, 41), uniform_matrix(m, d, -1.5, 1.0, 42)};
    const Matrix cov = dip_covariance(s);
    std::mt19937_64 rng(43);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
    const int draws = 200000;
    Vector sum = Vector::Zero(d);
    Matrix outer = Matrix::Zero(d, d);
    for (int k = 0; k < draws; ++k) {
      const Eigen::Index i = pick(rng);
      Vector z(d);
      for (Eigen::Index j = 0; j < d; ++j)
        z(j) = s.mean(i, j) + std::exp(0.5 * s.logvar(i, j)) * normal(rng);
      sum += z;
      outer += z * z.transpose();
    }
    const Vector mean = sum / draws;
    const Matrix mc = outer / draws - mean * mean.transpose();
    const double rel = (mc - cov).cwiseAbs().maxCoeff() / cov.cwiseAbs().maxCoeff();
    o.check(rel <= 0.05, "DIP covariance Monte-Carlo relative error " + fmt(rel));
    summary += "DIP MC " + fmt(rel, 2) + "; ";
  }

  // Minibatch log q(z) against the direct density sum, one latent, M = 2.
  {
    Matrix mu(2, 1), lv(2, 1), z(2, 1);
    mu << -0.4, 0.9;
    lv << std::log(1.44), std::log(0.36);
    z << 0.1, 1.3;
    const std::int64_t n = 50;
    const TcTerms t = tc_minibatch_log_qz(z, {mu, lv}, n);
    double direct = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double density = std::exp(log_normal_pdf(z(i), mu(0), lv(0))) +
                             std::exp(log_normal_pdf(z(i), mu(1), lv(1)));
      direct += std::log(density / (static_cast<double>(n) * 2.0)) / 2.0;
    }
    const double err = std::max(std::abs(t.log_qz - direct), std::abs(t.log_prod_qzj - direct));
    o.check(err <= 1e-10, "minibatch log q(z) error " + fmt(err));
    summary += "TC direct " + fmt(err, 2) + "; ";
  }

  // beta = 1 equals the negative ELBO, exactly.
  {
    Architecture a;
    a.input_dim = 6;
    a.encoder_hidden = {5};
    a.latent_dim = 3;
    a.decoder_hidden = {4};
    const ModelParams p = initialize_params(a, 51);
    const Matrix x = uniform_matrix(7, 6, 0, 1, 52).array().round();
    const ForwardTrace t = forward(p, x, gaussian_matrix(7, 3, 53));
    const LossBreakdown l = objective_loss(t, x, ObjectiveConfig{}, 0);
    o.check(l.total == negative_elbo(t, x), "beta = 1 loss differs from negative ELBO");
    // Independent restatement of -ELBO: per-pixel BCE plus Gaussian KL.
    double hand = 0.0;
    for (Eigen::Index i = 0; i < 7; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) {
        const double prob = 1.0 / (1.0 + std::exp(-t.logits(i, j)));
        hand -= x(i, j) * std::log(prob) + (1 - x(i, j)) * std::log(1 - prob);
      }
      for (Eigen::Index j = 0; j < 3; ++j) {
        const double m = t.stats.mean(i, j), v = t.stats.logvar(i, j);
        hand += 0.5 * (m * m + std::exp(v) - 1.0 - v);
      }
    }
    hand /= 7.0;
    o.check(std::abs(hand - l.total) <= 1e-12 * std::abs(hand),
            "negative ELBO differs from hand evaluation by " + fmt(std::abs(hand - l.total)));
  }
  o.summary = summary + "beta=1 == -ELBO";
  return o;
}

// ---------------------------------------------------------------- 4

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + SIMSCOPE_CLI_PATH + "' " + args + " > /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

Outcome determinism_and_format() {
  Outcome o;
  TempDir dir("acceptance_det");
  std::size_t dumps = 0;
  for (const char* name : {"a", "b"}) {
    o.check(run_cli("train --objective beta_vae --reg 4 --seed 11 --steps 300 --out " +
                    q(dir.path() / name)) == 0,
            std::string("train run ") + name + " failed");
  }
  const std::string manifest_a = read_file(dir.path() / "a" / kManifestFile);
  o.check(manifest_a == read_file(dir.path() / "b" / kManifestFile), "manifests differ");
  const SnapshotManifest m = manifest_from_json(manifest_a);
  for (const auto& s : m.snapshots) {
    for (const auto& f : s.files) {
      ++dumps;
      o.check(read_file(dir.path() / "a" / f) == read_file(dir.path() / "b" / f),
              "dump " + f + " differs");
    }
  }

  // SSAD round trip, including values that stress the encoding.
  Matrix values = gaussian_matrix(257, 33, 5);
  values(0, 0) = std::numeric_limits<double>::denorm_min();
  values(1, 0) = -0.0;
  values(2, 0) = std::numeric_limits<double>::max();
  values(3, 0) = 1.0 / 3.0;
  const ActivationMatrix original(values, "encoder_2");
  save_activation(dir.path() / "rt64.ssad", original, DumpDtype::kFloat64);
  const ActivationMatrix back = load_activation(dir.path() / "rt64.ssad");
  o.check(back.layer_name() == "encoder_2" && back.n() == 257 && back.p() == 33 &&
              std::memcmp(back.data().data(), values.data(), sizeof(double) * values.size()) == 0,
          "float64 SSAD round trip is not bit-exact");
  Matrix singles = gaussian_matrix(64, 9, 6).cast<float>().cast<double>();
  singles(0, 0) = static_cast<double>(std::numeric_limits<float>::denorm_min());
  singles(1, 0) = static_cast<double>(std::numeric_limits<float>::max());
  save_activation(dir.path() / "rt32.ssad", ActivationMatrix(singles, "x"), DumpDtype::kFloat32);
  const ActivationMatrix back32 = load_activation(dir.path() / "rt32.ssad");
  o.check(std::memcmp(back32.data().data(), singles.data(), sizeof(double) * singles.size()) == 0,
          "float32 SSAD round trip is not bit-exact");

  // Sequential versus parallel grid evaluation.
  for (const char* ext : {"csv", "json"}) {
    const std::string base = "compare --mode epochs --metric conservative --left " +
                             q(dir.path() / "a") + " --left-step 0 --right " + q(dir.path() / "a");
    const auto seq = dir.path() / (std::string("seq.") + ext);
    const auto par = dir.path() / (std::string("par.") + ext);
    o.check(run_cli(base + " --threads 1 --out " + q(seq)) == 0, "sequential compare failed");
    o.check(run_cli(base + " --threads 4 --out " + q(par)) == 0, "parallel compare failed");
    o.check(read_file(seq) == read_file(par), std::string(ext) + " output not byte-stable");
  }
  o.summary = std::to_string(dumps) + " dumps byte-identical, SSAD f64/f32 bit-exact, CSV/JSON " +
              "byte-stable across 1 vs 4 threads";
  return o;
}

// ---------------------------------------------------------------- 5-8

constexpr int kSeeds = 5;
constexpr std::int64_t kSteps = 5000;

// Every run shares data_seed 0, so all evaluation batches coincide.
struct ToyRuns {
  TempDir dir{"acceptance_toy"};

  std::filesystem::path path(const std::string& tag, int seed) const {
    return dir.path() / (tag + "_s" + std::to_string(seed));
  }

  void ensure(const std::string& tag, double beta, Eigen::Index latent, int seed) {
    const auto out = path(tag, seed);
    if (std::filesystem::exists(out / kManifestFile)) return;
    ToyRunConfig c;
    c.objective.beta = beta;
    c.architecture.latent_dim = latent;
    c.train.steps = kSteps;
    c.train.seed = static_cast<std::uint64_t>(seed);
    c.train.output_dir = out;
    run_toy_training(c);
  }
};

SimilarityGrid compare_runs(ExperimentMode mode, Metric metric, RunRef left, RunRef right) {
  ExperimentPlan plan;
  plan.mode = mode;
  plan.metric = metric;
  plan.comparisons.push_back({"pair", {{std::move(left), std::move(right)}}});
  return run_experiment_matrix(plan)[0].grid;
}

double diagonal(const SimilarityGrid& g, const std::string& layer) {
  const auto i = std::find(g.rows.begin(), g.rows.end(), layer) - g.rows.begin();
  return g.scores(i, i);
}

Outcome bottom_up_learning(ToyRuns& runs) {
  Outcome o;
  const std::int64_t early = kSteps * 5 / 100;
  double enc = 0.0, dec = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    runs.ensure("b1", 1.0, 10, s);
    const SimilarityGrid g = compare_runs(ExperimentMode::kEpochs, Metric::kConservative,
                                          {runs.path("b1", s), early}, {runs.path("b1", s)});
    enc += (diagonal(g, "encoder_1") + diagonal(g, "encoder_2")) / 2.0;
    dec += (diagonal(g, "decoder_1") + diagonal(g, "decoder_2") + diagonal(g, "decoder_3")) / 3.0;
  }
  enc /= kSeeds;
  dec /= kSeeds;
  o.check(enc - dec >= 0.1, "encoder minus decoder self-similarity " + fmt(enc - dec) +
                                " below 0.1");
  o.summary = "step " + std::to_string(early) + " vs " + std::to_string(kSteps) +
              ", encoder " + fmt(enc) + ", decoder " + fmt(dec) + ", 5 seeds";
  return o;
}

Outcome encoder_stability(ToyRuns& runs) {
  Outcome o;
  std::map<std::string, double> avg;
  const std::vector<std::string> layers{"encoder_1", "encoder_2", "mean", "sampled"};
  for (int s = 0; s < kSeeds; ++s) {
    runs.ensure("b1", 1.0, 10, s);
    runs.ensure("b16", 16.0, 10, s);
    const SimilarityGrid g = compare_runs(ExperimentMode::kRegularisation, Metric::kCka,
                                          {runs.path("b1", s)}, {runs.path("b16", s)});
    for (const auto& l : layers) avg[l] += diagonal(g, l) / kSeeds;
  }
  const double enc_min = std::min(avg["encoder_1"], avg["encoder_2"]);
  o.check(avg["encoder_1"] >= 0.6, "encoder_1 CKA " + fmt(avg["encoder_1"]) + " below 0.6");
  o.check(avg["encoder_2"] >= 0.6, "encoder_2 CKA " + fmt(avg["encoder_2"]) + " below 0.6");
  o.check(avg["mean"] < enc_min, "mean CKA " + fmt(avg["mean"]) + " not below encoder minimum");
  o.check(avg["sampled"] < enc_min,
          "sampled CKA " + fmt(avg["sampled"]) + " not below encoder minimum");
  o.summary = "beta 1 vs 16: encoder_1 " + fmt(avg["encoder_1"]) + ", encoder_2 " +
              fmt(avg["encoder_2"]) + ", mean " + fmt(avg["mean"]) + ", sampled " +
              fmt(avg["sampled"]) + ", 5 seeds";
  return o;
}

Outcome collapse_detection(ToyRuns& runs, double& collapsed_ms) {
  Outcome o;
  double ms1 = 0.0, ms16 = 0.0, passive1 = 0.0, passive16 = 0.0;
  std::string verdicts;
  for (int s = 0; s < kSeeds; ++s) {
    runs.ensure("b1", 1.0, 10, s);
    runs.ensure("b16", 16.0, 10, s);
    const LatentDiagnosis d1 = diagnose_run(runs.path("b1", s), runs.path("b1", s));
    const LatentDiagnosis d16 = diagnose_run(runs.path("b16", s), runs.path("b1", s));
    ms1 += d1.cka_mean_sampled.value / kSeeds;
    ms16 += d16.cka_mean_sampled.value / kSeeds;
    passive1 += static_cast<double>(d1.passive_count()) / kSeeds;
    passive16 += static_cast<double>(d16.passive_count()) / kSeeds;
    o.check(d16.verdict != Verdict::kHealthy,
            "seed " + std::to_string(s) + ": beta 16 diagnosed HEALTHY");
    verdicts += std::string(verdicts.empty() ? "" : "/") + std::string(to_string(d16.verdict));
  }
  collapsed_ms = ms16;
  o.check(ms1 - ms16 >= 0.2, "cka_mean_sampled drop " + fmt(ms1 - ms16) + " below 0.2");
  o.check(passive16 > passive1, "passive count did not increase (" + fmt(passive1) + " -> " +
                                    fmt(passive16) + ")");
  o.summary = "cka_mean_sampled " + fmt(ms1) + " -> " + fmt(ms16) + ", passive " +
              fmt(passive1) + " -> " + fmt(passive16) + ", beta 16 verdicts " + verdicts;
  return o;
}

Outcome polarised_separation(ToyRuns& runs, double collapsed_ms) {
  Outcome o;
  double ms20 = 0.0, passive = 0.0, ratio = 0.0;
  std::string verdicts;
  for (int s = 0; s < kSeeds; ++s) {
    runs.ensure("b1", 1.0, 10, s);
    runs.ensure("b1_lat20", 1.0, 20, s);
    const LatentDiagnosis d = diagnose_run(runs.path("b1_lat20", s), runs.path("b1", s));
    ms20 += d.cka_mean_sampled.value / kSeeds;
    passive += static_cast<double>(d.passive_count()) / kSeeds;
    ratio += d.reconstruction / d.baseline_reconstruction / kSeeds;
    o.check(d.verdict == Verdict::kPolarised,
            "seed " + std::to_string(s) + ": verdict " + std::string(to_string(d.verdict)) +
                " (cka_mean_sampled " + fmt(d.cka_mean_sampled.value) + ", passive " +
                std::to_string(d.passive_count()) + ")");
    verdicts += std::string(verdicts.empty() ? "" : "/") + std::string(to_string(d.verdict));
  }
  o.check(ms20 - collapsed_ms >= 0.2, "cka_mean_sampled margin over the collapsed run " +
                                          fmt(ms20 - collapsed_ms) + " below 0.2");
  o.summary = "20-latent cka_mean_sampled " + fmt(ms20) + " vs collapsed " + fmt(collapsed_ms) +
              ", passive " + fmt(passive) + ", recon ratio " + fmt(ratio) + ", verdicts " +
              verdicts;
  return o;
}

}  // namespace

int main() {
  bool ok = true;
  ok &= report(1, "synthetic shared-feature benchmark", 60, synthetic_reproduction);
  ok &= report(2, "metric property suite", 120, metric_properties);
  ok &= report(3, "loss and gradient suite", 120, loss_and_gradients);
  ok &= report(4, "determinism and formats", 0, determinism_and_format);

  ToyRuns runs;
  double collapsed_ms = std::numeric_limits<double>::quiet_NaN();
  ok &= report(5, "bottom-up learning", 600, [&] { return bottom_up_learning(runs); });
  ok &= report(6, "encoder stability across regularisation", 900,
               [&] { return encoder_stability(runs); });
  ok &= report(7, "collapse detection", 900,
               [&] { return collapse_detection(runs, collapsed_ms); });
  ok &= report(8, "polarised versus collapsed", 600,
               [&] { return polarised_separation(runs, collapsed_ms); });
  return ok ? 0 : 1;
}
