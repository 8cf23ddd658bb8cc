#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "voz/audio.hpp"
#include "voz/features.hpp"

namespace voz {

struct ExcitationStats {
    int clamped_frames = 0;  // frames whose F0 fell outside [f0_min, f0_max]
};

/// Mixed impulse/noise excitation on the frame grid. Voiced frames carry
/// impulses of amplitude sqrt(period) (unit energy per sample), with pulse
/// phase carried across frame boundaries; unvoiced frames carry seeded
/// unit-variance white noise. Length is frames * shift samples.
std::vector<double> build_excitation(std::span<const F0Frame> contour, double frame_shift_s,
                                     uint32_t sample_rate, uint64_t seed, double f0_min,
                                     double f0_max, ExcitationStats* stats = nullptr);

/// Filter the excitation through per-frame minimum-phase spectral envelopes
/// reconstructed from the mel-cepstra (inverse of the analysis map), hop-
/// synchronized overlap-add. Exactly linear in the excitation; no gain
/// normalization.
std::vector<double> synthesize_raw(const std::vector<std::vector<double>>& mcep,
                                   std::span<const double> excitation, double alpha,
                                   uint32_t sample_rate, double frame_shift_s);

struct SynthesisStats {
    double raw_peak = 0.0;  // peak magnitude before normalization
};

/// synthesize_raw followed by peak normalization to 0.9.
AudioBuffer synthesize(const std::vector<std::vector<double>>& mcep,
                       std::span<const double> excitation, double alpha, uint32_t sample_rate,
                       double frame_shift_s, SynthesisStats* stats = nullptr);

/// Diagnostic path: analyze, then vocode straight from the analyzed
/// parameters, bypassing any models.
AudioBuffer copy_synthesis(const AudioBuffer& audio, const AnalysisConfig& cfg,
                           uint64_t seed = 0, SynthesisStats* stats = nullptr);

}  // namespace voz
