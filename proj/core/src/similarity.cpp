#include "simscope/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "simscope/error.hpp"

namespace simscope {
namespace {

double clamp_checked(double raw, double upper, const char* what) {
  if (!std::isfinite(raw) || raw < -kClampSlack || raw > upper + kClampSlack) {
    throw Error(ErrorKind::kNumerical, std::string(what) + ": value " +
                                           std::to_string(raw) +
                                           " outside admissible range");
  }
  return std::clamp(raw, 0.0, upper);
}

void require_same_rows(const ActivationMatrix& x, const ActivationMatrix& y,
                       const char* what) {
  if (x.n() != y.n()) {
    throw Error(ErrorKind::kShape,
                std::string(what) + ": row count mismatch between '" +
                    x.layer_name() + "' (" + std::to_string(x.n()) + ") and '" +
                    y.layer_name() + "' (" + std::to_string(y.n()) + ")");
  }
}

// Per-layer quantities reused across every cell of a grid.
struct Prepared {
  Matrix centered;
  double self_gram_norm = 0.0;  // ||Xc^T Xc||_F
  std::optional<ActivationMatrix> normalized;
};

Prepared prepare(const ActivationMatrix& m, bool for_cka, bool for_procrustes) {
  Prepared out;
  if (for_cka) {
    out.centered = m.centered() ? m.data() : center_columns(m).data();
    if (out.centered.norm() < kDegenerateNorm) {
      throw Error(ErrorKind::kDegenerate, "linear_cka: layer '" +
                                              m.layer_name() +
                                              "' has no variation after centering");
    }
    out.self_gram_norm = (out.centered.transpose() * out.centered).norm();
  }
  if (for_procrustes) {
    out.normalized = m.normalized() ? m : procrustes_normalize(m);
  }
  return out;
}

double cka_prepared(const Prepared& x, const Prepared& y) {
  const double cross = (y.centered.transpose() * x.centered).squaredNorm();
  const double raw = cross / (x.self_gram_norm * y.self_gram_norm);
  return clamp_checked(raw, 1.0, "linear_cka");
}

double procrustes_distance_raw(const ActivationMatrix& x_dot,
                               const ActivationMatrix& y_dot) {
  const Matrix cross = y_dot.data().transpose() * x_dot.data();
  const double raw = x_dot.data().squaredNorm() + y_dot.data().squaredNorm() -
                     2.0 * nuclear_norm(cross);
  return clamp_checked(raw, 2.0, "procrustes_distance");
}

double procrustes_similarity_prepared(const Prepared& x, const Prepared& y) {
  const double distance = procrustes_distance_raw(*x.normalized, *y.normalized);
  return clamp_checked(1.0 - 0.5 * distance, 1.0, "procrustes_similarity");
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kCka: return "cka";
    case Metric::kProcrustes: return "procrustes";
    case Metric::kConservative: return "conservative";
  }
  return "unknown";
}

Metric parse_metric(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "cka") return Metric::kCka;
  if (lower == "procrustes") return Metric::kProcrustes;
  if (lower == "conservative") return Metric::kConservative;
  throw Error(ErrorKind::kConfig, "unknown metric '" + std::string(text) + "'");
}

SimilarityScore linear_cka(const ActivationMatrix& x, const ActivationMatrix& y) {
  require_same_rows(x, y, "linear_cka");
  const double value =
      cka_prepared(prepare(x, true, false), prepare(y, true, false));
  return {value, Metric::kCka, x.n()};
}

ProcrustesDistance procrustes_distance(const ActivationMatrix& x_dot,
                                       const ActivationMatrix& y_dot) {
  if (!x_dot.normalized() || !y_dot.normalized()) {
    throw Error(ErrorKind::kContract,
                "procrustes_distance: inputs must be procrustes-normalized");
  }
  require_same_rows(x_dot, y_dot, "procrustes_distance");
  return {procrustes_distance_raw(x_dot, y_dot)};
}

SimilarityScore procrustes_similarity(const ActivationMatrix& x,
                                      const ActivationMatrix& y) {
  require_same_rows(x, y, "procrustes_similarity");
  const double value = procrustes_similarity_prepared(prepare(x, false, true),
                                                      prepare(y, false, true));
  return {value, Metric::kProcrustes, x.n()};
}

SimilarityScore conservative_score(const ActivationMatrix& x,
                                   const ActivationMatrix& y) {
  const auto cka = linear_cka(x, y);
  const auto ps = procrustes_similarity(x, y);
  return {std::min(cka.value, ps.value), Metric::kConservative, x.n()};
}

SimilarityScore score(const ActivationMatrix& x, const ActivationMatrix& y,
                      Metric metric) {
  switch (metric) {
    case Metric::kCka: return linear_cka(x, y);
    case Metric::kProcrustes: return procrustes_similarity(x, y);
    case Metric::kConservative: return conservative_score(x, y);
  }
  throw Error(ErrorKind::kConfig, "unknown metric");
}

SimilarityGrid pairwise_grid(const std::vector<ActivationMatrix>& layers_a,
                             const std::vector<ActivationMatrix>& layers_b,
                             Metric metric, const GridOptions& options) {
  if (layers_a.empty() || layers_b.empty()) {
    throw Error(ErrorKind::kInvalidInput, "pairwise_grid: empty layer list");
  }
  const Eigen::Index n = layers_a.front().n();
  for (const auto* list : {&layers_a, &layers_b}) {
    for (const auto& layer : *list) {
      if (layer.n() != n) {
        throw Error(ErrorKind::kShape,
                    "pairwise_grid: layer '" + layer.layer_name() + "' has " +
                        std::to_string(layer.n()) + " rows, expected " +
                        std::to_string(n));
      }
    }
  }

  const bool need_cka = metric != Metric::kProcrustes;
  const bool need_ps = metric != Metric::kCka;
  std::vector<Prepared> prep_a;
  std::vector<Prepared> prep_b;
  prep_a.reserve(layers_a.size());
  prep_b.reserve(layers_b.size());
  for (const auto& l : layers_a) prep_a.push_back(prepare(l, need_cka, need_ps));
  for (const auto& l : layers_b) prep_b.push_back(prepare(l, need_cka, need_ps));

  const auto rows = static_cast<Eigen::Index>(layers_a.size());
  const auto cols = static_cast<Eigen::Index>(layers_b.size());
  SimilarityGrid grid;
  grid.metric = metric;
  grid.n_examples = n;
  for (const auto& l : layers_a) grid.rows.push_back(l.layer_name());
  for (const auto& l : layers_b) grid.cols.push_back(l.layer_name());
  grid.scores = Matrix::Zero(rows, cols);
  Matrix cka_values = Matrix::Zero(rows, cols);
  Matrix ps_values = Matrix::Zero(rows, cols);

  const Eigen::Index cells = rows * cols;
  auto evaluate = [&](Eigen::Index cell) {
    const Eigen::Index i = cell / cols;
    const Eigen::Index j = cell % cols;
    if (need_cka) cka_values(i, j) = cka_prepared(prep_a[i], prep_b[j]);
    if (need_ps) ps_values(i, j) = procrustes_similarity_prepared(prep_a[i], prep_b[j]);
  };

  const unsigned workers = std::max(
      1u, std::min<unsigned>(options.threads, static_cast<unsigned>(cells)));
  if (workers == 1) {
    for (Eigen::Index c = 0; c < cells; ++c) evaluate(c);
  } else {
    // Each cell is written by exactly one worker; on failure the error of
    // the lowest-indexed failing cell is rethrown so behaviour matches the
    // sequential sweep.
    std::vector<std::pair<Eigen::Index, std::exception_ptr>> failures(workers);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          failures[w].first = std::numeric_limits<Eigen::Index>::max();
          for (Eigen::Index c = w; c < cells; c += workers) {
            try {
              evaluate(c);
            } catch (...) {
              failures[w] = {c, std::current_exception()};
              return;
            }
          }
        });
      }
    }
    auto first = std::min_element(
        failures.begin(), failures.end(),
        [](const auto& a, const auto& b) { return a.first < b.first; });
    if (first->second) std::rethrow_exception(first->second);
  }

  switch (metric) {
    case Metric::kCka:
      grid.scores = cka_values;
      break;
    case Metric::kProcrustes:
      grid.scores = ps_values;
      break;
    case Metric::kConservative:
      grid.scores = cka_values.cwiseMin(ps_values);
      grid.disagreement =
          ((cka_values - ps_values).cwiseAbs().array() > kDisagreementThreshold)
              .matrix();
      grid.cka = std::move(cka_values);
      grid.procrustes = std::move(ps_values);
      break;
  }
  return grid;
}

SimilarityGrid average_grids(const std::vector<SimilarityGrid>& grids) {
  if (grids.empty()) {
    throw Error(ErrorKind::kInvalidInput, "average_grids: no grids given");
  }
  const SimilarityGrid& ref = grids.front();
  for (const auto& g : grids) {
    if (g.rows != ref.rows || g.cols != ref.cols || g.metric != ref.metric ||
        g.scores.rows() != ref.scores.rows() ||
        g.scores.cols() != ref.scores.cols() ||
        g.cka.has_value() != ref.cka.has_value()) {
      throw Error(ErrorKind::kInvalidInput,
                  "average_grids: grids differ in layers or metric");
    }
  }
  const double count = static_cast<double>(grids.size());
  SimilarityGrid out = ref;
  out.seeds_averaged = grids.size();
  out.scores.setZero();
  for (const auto& g : grids) out.scores += g.scores;
  out.scores /= count;
  if (ref.cka) {
    out.cka->setZero();
    out.procrustes->setZero();
    for (const auto& g : grids) {
      *out.cka += *g.cka;
      *out.procrustes += *g.procrustes;
    }
    *out.cka /= count;
    *out.procrustes /= count;
    out.disagreement =
        ((*out.cka - *out.procrustes).cwiseAbs().array() > kDisagreementThreshold)
            .matrix();
  }
  return out;
}

}  // namespace simscope
