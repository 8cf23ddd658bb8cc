#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "voz/features.hpp"
#include "voz/hmm.hpp"
#include "voz/textproc.hpp"

namespace voz {

/// Frame allocation for a synthesis run: one step per chain state.
struct StateTrajectoryPlan {
    struct Step {
        std::string phoneme;
        int state = 0;
        int frames = 0;  // >= 1
    };
    std::vector<Step> steps;

    int total_frames() const;
};

/// Frames per state = max(1, round(rate * duration mean)); halves round up.
StateTrajectoryPlan predict_durations(const PhoneticSpec& spec, const ModelSet& models,
                                      double rate);

/// Maximum-likelihood static trajectory for one feature dimension under
/// static+delta+delta2 Gaussian constraints: solves
/// (W' S^-1 W) c = W' S^-1 mu with the banded Cholesky solver. Infinite
/// variances drop their rows (precision 0); boundary rows use the same edge
/// replication as compute_deltas.
std::vector<double> mlpg_track(std::span<const std::array<double, 3>> means,
                               std::span<const std::array<double, 3>> vars);

/// Smoothed mel-cepstral trajectory for a plan: one mlpg_track solve per
/// cepstral dimension. Returns [T][order+1].
std::vector<std::vector<double>> mlpg(const StateTrajectoryPlan& plan, const ModelSet& models);

/// Per-frame F0 decisions for a plan: a frame is voiced iff its state's
/// voiced weight exceeds 0.5; voiced runs of >= 3 frames get mlpg-smoothed
/// log F0, shorter runs use the static means directly.
std::vector<F0Frame> generate_f0(const StateTrajectoryPlan& plan, const ModelSet& models);

}  // namespace voz
