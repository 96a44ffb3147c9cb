#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "simscope/backward.hpp"
#include "error_kind.hpp"
#include "support.hpp"

namespace simscope {
namespace {

using testing::gaussian_matrix;
using testing::kind_of;

Architecture tiny_arch() {
  Architecture a;
  a.input_dim = 4;
  a.encoder_hidden = {5};
  a.latent_dim = 2;
  a.decoder_hidden = {5};
  return a;
}

ObjectiveConfig config_for(ObjectiveKind kind) {
  ObjectiveConfig c;
  c.kind = kind;
  c.beta = 4.0;
  c.gamma = 2.0;
  c.c_max = 1.0;
  c.iteration_threshold = 10;
  c.dataset_size = 10;
  c.lambda_od = 3.0;
  c.lambda_d = 2.0;
  return c;
}

Matrix pixels(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

class GradientCheck : public ::testing::TestWithParam<ObjectiveKind> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const ObjectiveConfig cfg = config_for(GetParam());
  const std::int64_t step = 4;
  const double h = 1e-5;
  for (std::uint64_t restart = 0; restart < 10; ++restart) {
    const ModelParams p = initialize_params(tiny_arch(), 100 + restart);
    const Matrix x = pixels(3, 4, 200 + restart);
    const Matrix eps = gaussian_matrix(3, 2, 300 + restart);
    const Vector analytic = backward(p, forward(p, x, eps), x, cfg, step).flatten();

    const Vector theta = p.flatten();
    ModelParams q = p;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Vector t = theta;
      t(i) += h;
      q.assign(t);
      const double up = objective_loss(forward(q, x, eps), x, cfg, step).total;
      t(i) -= 2.0 * h;
      q.assign(t);
      const double down = objective_loss(forward(q, x, eps), x, cfg, step).total;
      const double numeric = (up - down) / (2.0 * h);
      // Relative error, with gradients below 1e-4 in magnitude compared on
      // an absolute 1e-8 scale where finite differences carry no digits.
      const double scale = std::max({std::abs(numeric), std::abs(analytic(i)), 1e-4});
      worst = std::max(worst, std::abs(numeric - analytic(i)) / scale);
    }
    EXPECT_LE(worst, 1e-4) << to_string(cfg.kind) << " restart " << restart;
  }
}

INSTANTIATE_TEST_SUITE_P(AllObjectives, GradientCheck,
                         ::testing::Values(ObjectiveKind::kBetaVae, ObjectiveKind::kAnnealedVae,
                                           ObjectiveKind::kBetaTcVae, ObjectiveKind::kDipVaeII),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Backward, SaturatedReconstructionWithoutKlHasZeroGradient) {
  ModelParams p = initialize_params(tiny_arch(), 1).zeros_like();
  Matrix x(3, 4);
  x << 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0;
  p.output.bias << 30, -30, 30, -30;
  ObjectiveConfig cfg;
  cfg.kind = ObjectiveKind::kAnnealedVae;
  cfg.gamma = 0.0;
  const Matrix eps = gaussian_matrix(3, 2, 5);
  const Vector g = backward(p, forward(p, x, eps), x, cfg, 0).flatten();
  EXPECT_LE(g.cwiseAbs().maxCoeff(), 1e-8);
}

TEST_P(GradientCheck, DuplicatedBatchLeavesGradientUnchanged) {
  ObjectiveConfig cfg = config_for(GetParam());
  cfg.dataset_size = 20;
  const ModelParams p = initialize_params(tiny_arch(), 7);
  const Matrix x = pixels(3, 4, 8);
  const Matrix eps = gaussian_matrix(3, 2, 9);
  Matrix x2(6, 4), eps2(6, 2);
  x2 << x, x;
  eps2 << eps, eps;
  const Vector g1 = backward(p, forward(p, x, eps), x, cfg, 4).flatten();
  const Vector g2 = backward(p, forward(p, x2, eps2), x2, cfg, 4).flatten();
  EXPECT_LE((g1 - g2).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Backward, ClampedLogvarBlocksGradient) {
  ModelParams p = initialize_params(tiny_arch(), 2);
  p.logvar_head.bias << 40.0, 0.0;  // first latent pinned at the upper clamp
  const Matrix x = pixels(3, 4, 3);
  const Matrix eps = gaussian_matrix(3, 2, 4);
  const ModelParams g = backward(p, forward(p, x, eps), x, ObjectiveConfig{}, 0);
  EXPECT_EQ(g.logvar_head.bias(0), 0.0);
  EXPECT_NE(g.logvar_head.bias(1), 0.0);
}

TEST(Backward, StaleTraceIsAContractError) {
  const ModelParams p = initialize_params(tiny_arch(), 1);
  Architecture wider = tiny_arch();
  wider.encoder_hidden = {6};
  const ModelParams other = initialize_params(wider, 1);
  const Matrix x = pixels(3, 4, 2);
  const ForwardTrace t = forward(other, x, gaussian_matrix(3, 2, 3));
  EXPECT_EQ(kind_of([&] { backward(p, t, x, ObjectiveConfig{}, 0); }), ErrorKind::kContract);
}

}  // namespace
}  // namespace simscope
