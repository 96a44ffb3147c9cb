#include "simscope/training.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "simscope/backward.hpp"
#include "simscope/error.hpp"
#include "simscope/noise.hpp"

namespace simscope {
namespace {

std::string describe(const LossBreakdown& loss) {
  std::ostringstream ss;
  ss << "total=" << loss.total << " reconstruction=" << loss.reconstruction
     << " kl=" << loss.kl << " penalty=" << loss.penalty;
  if (loss.total_correlation) ss << " tc=" << *loss.total_correlation;
  if (loss.capacity) ss << " capacity=" << *loss.capacity;
  return ss.str();
}

// Endless stream of seeded epoch permutations.
class BatchSampler {
 public:
  BatchSampler(Eigen::Index rows, std::uint64_t seed)
      : order_(static_cast<std::size_t>(rows)), rng_(seed) {
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  std::vector<Eigen::Index> next(Eigen::Index size) {
    std::vector<Eigen::Index> batch;
    batch.reserve(static_cast<std::size_t>(size));
    while (static_cast<Eigen::Index>(batch.size()) < size) {
      if (cursor_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        cursor_ = 0;
      }
      batch.push_back(order_[cursor_++]);
    }
    return batch;
  }

 private:
  std::vector<Eigen::Index> order_;
  std::mt19937_64 rng_;
  std::size_t cursor_ = 0;
};

// Snapshot noise stream of one run: shared by all of its snapshots, distinct
// across configurations so two different models never see the same draw.
// The top bit is always set, so it cannot collide with a training step.
std::uint64_t eval_noise_stream(const ObjectiveConfig& cfg, Eigen::Index latent_dim) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  auto feed = [&](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      hash ^= (word >> (8 * i)) & 0xFF;
      hash *= 0x100000001b3ull;
    }
  };
  feed(static_cast<std::uint64_t>(cfg.kind));
  for (double v : {cfg.beta, cfg.gamma, cfg.c_max, cfg.lambda_od, cfg.lambda_d}) {
    feed(std::bit_cast<std::uint64_t>(v));
  }
  feed(static_cast<std::uint64_t>(cfg.iteration_threshold));
  feed(static_cast<std::uint64_t>(latent_dim));
  return kEvalStream ^ (hash >> 1);
}

}  // namespace

AdamOptimizer::AdamOptimizer(std::size_t size, AdamSettings settings)
    : settings_(settings),
      m_(Vector::Zero(static_cast<Eigen::Index>(size))),
      v_(Vector::Zero(static_cast<Eigen::Index>(size))) {}

void AdamOptimizer::step(Vector& params, const Vector& grad) {
  ++t_;
  m_ = settings_.beta1 * m_ + (1.0 - settings_.beta1) * grad;
  v_ = settings_.beta2 * v_ + (1.0 - settings_.beta2) * grad.cwiseAbs2();
  const double bc1 = 1.0 - std::pow(settings_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(settings_.beta2, static_cast<double>(t_));
  params.array() -= settings_.learning_rate * (m_.array() / bc1) /
                    ((v_.array() / bc2).sqrt() + settings_.epsilon);
}

std::vector<std::int64_t> default_snapshot_steps(std::int64_t total_steps) {
  std::vector<std::int64_t> steps;
  for (int percent : {0, 1, 5, 10, 25, 50, 100}) {
    steps.push_back(total_steps * percent / 100);
  }
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

TrainResult train(ModelParams params, const Matrix& train_rows,
                  const Matrix& eval_batch, ObjectiveConfig cfg,
                  const TrainOptions& options) {
  params.validate();
  if (cfg.dataset_size <= 0) cfg.dataset_size = train_rows.rows();
  validate(cfg);
  if (options.steps < 0) throw Error(ErrorKind::kConfig, "train: negative step count");
  if (options.batch_size < 1 || options.batch_size > train_rows.rows()) {
    throw Error(ErrorKind::kConfig, "train: batch size must be in [1, training rows]");
  }
  if (train_rows.cols() != params.input_dim() ||
      eval_batch.cols() != params.input_dim() || eval_batch.rows() < 2) {
    throw Error(ErrorKind::kShape, "train: data width differs from model input");
  }

  std::vector<std::int64_t> schedule = options.snapshot_steps.empty()
                                           ? default_snapshot_steps(options.steps)
                                           : options.snapshot_steps;
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  std::erase_if(schedule, [&](std::int64_t s) { return s < 0 || s > options.steps; });

  TrainResult result;
  SnapshotManifest header;
  header.objective = cfg;
  header.seed = options.seed;
  header.total_steps = options.steps;
  header.latent_dim = params.latent_dim();
  header.eval_fingerprint = matrix_fingerprint(eval_batch);
  header.layer_names =
      trace_layer_names(params.encoder.size(), params.decoder.size());

  std::optional<SnapshotWriter> writer;
  if (options.output_dir) {
    writer.emplace(*options.output_dir, header, options.dump_dtype);
  }
  result.manifest = header;

  const Matrix eval_noise = keyed_normal_matrix(options.seed,
                                                eval_noise_stream(cfg, params.latent_dim()),
                                                eval_batch.rows(),
                                                params.latent_dim());
  auto take_snapshot = [&](std::int64_t step) {
    ForwardTrace trace = forward(params, eval_batch, eval_noise);
    LossBreakdown loss = objective_loss(trace, eval_batch, cfg, step);
    if (!std::isfinite(loss.total)) {
      throw Error(ErrorKind::kNumerical, "train: non-finite evaluation loss at step " +
                                             std::to_string(step) + " (" +
                                             describe(loss) + ")");
    }
    if (writer) {
      result.manifest.snapshots.push_back(
          writer->write(step, trace.layers(), loss.reconstruction, loss.kl));
    } else {
      SnapshotEntry entry;
      entry.step = step;
      entry.eval_reconstruction = loss.reconstruction;
      entry.eval_kl = loss.kl;
      result.manifest.snapshots.push_back(std::move(entry));
    }
    if (options.keep_traces) {
      result.snapshots.push_back({step, std::move(trace), loss});
    }
  };

  BatchSampler sampler(train_rows.rows(), options.seed);
  AdamOptimizer adam(params.parameter_count(), options.adam);
  Vector flat = params.flatten();
  auto next_snapshot = schedule.begin();
  result.loss_history.reserve(static_cast<std::size_t>(options.steps));

  for (std::int64_t step = 0;; ++step) {
    if (next_snapshot != schedule.end() && *next_snapshot == step) {
      take_snapshot(step);
      ++next_snapshot;
    }
    if (step == options.steps) break;

    const auto rows = sampler.next(options.batch_size);
    const Matrix batch = select_rows(train_rows, rows);
    const Matrix noise = keyed_normal_matrix(options.seed,
                                             static_cast<std::uint64_t>(step), rows,
                                             params.latent_dim());
    const ForwardTrace trace = forward(params, batch, noise);
    const LossBreakdown loss = objective_loss(trace, batch, cfg, step);
    if (!std::isfinite(loss.total)) {
      throw Error(ErrorKind::kNumerical, "train: non-finite loss at step " +
                                             std::to_string(step) + " (" +
                                             describe(loss) + ")");
    }
    result.loss_history.push_back(loss.total);
    const ModelParams grads = backward(params, trace, batch, cfg, step);
    adam.step(flat, grads.flatten());
    params.assign(flat);
  }
  if (writer) result.manifest = writer->manifest();
  result.params = std::move(params);
  return result;
}

}  // namespace simscope
