#pragma once

#include <cstdint>

#include "simscope/objectives.hpp"

namespace simscope {

/// Exact reverse-mode gradient of objective_loss(trace, targets, cfg, step)
/// with respect to every parameter, holding the trace's noise fixed.
/// Throws kContract if the trace does not match the parameter shapes.
ModelParams backward(const ModelParams& params, const ForwardTrace& trace,
                     const Matrix& targets, const ObjectiveConfig& cfg,
                     std::int64_t step);

}  // namespace simscope
