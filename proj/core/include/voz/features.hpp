#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "voz/audio.hpp"

namespace voz {

struct AnalysisConfig {
    uint32_t sample_rate = 16000;
    double frame_length_s = 0.025;
    double frame_shift_s = 0.005;
    int order = 24;       // M: mel-cepstral coefficients c0..cM
    double alpha = 0.42;  // frequency-warping factor for 16 kHz
    double f0_min = 60.0;
    double f0_max = 400.0;
};

/// One analysis frame. `mcep` holds the static coefficients c0..cM after
/// analysis and [static | delta | delta-delta] after compute_deltas.
/// The lf0 triple (log F0, delta, delta-delta) is meaningful iff `voiced`.
struct FrameVector {
    std::vector<double> mcep;
    bool voiced = false;
    std::array<double, 3> lf0{0.0, 0.0, 0.0};
};

struct FeatureSequence {
    std::vector<FrameVector> frames;
    double frame_shift_s = 0.005;
    uint32_t sample_rate = 16000;
    int order = 24;
    bool has_deltas = false;

    std::size_t spectral_dim() const {
        return std::size_t(has_deltas ? 3 * (order + 1) : (order + 1));
    }
};

struct F0Frame {
    bool voiced = false;
    double f0_hz = 0.0;
};

/// Split into Hamming-windowed frames. Frame count is
/// floor((N - L) / S) + 1; audio shorter than one frame is an error.
std::vector<std::vector<double>> frame_signal(const AudioBuffer& audio, double frame_length_s,
                                              double frame_shift_s);

/// Mel-cepstrum of one windowed frame: log magnitude spectrum floored at
/// -60 dB below the frame peak, resampled on the warped frequency grid
/// (first-order all-pass map), inverse cosine transform, first M+1 terms.
std::vector<double> mel_cepstrum(std::span<const double> windowed_frame, int order, double alpha);

/// Normalized-autocorrelation pitch tracker on the 25 ms / 5 ms grid
/// (the grid of frame_signal, so tracks align with spectral frames).
/// Voiced iff peak correlation >= 0.3 and frame RMS >= 1e-4; a 3-point
/// median filter runs over each voiced run.
std::vector<F0Frame> extract_f0(const AudioBuffer& audio, double f0_min, double f0_max,
                                double frame_length_s = 0.025, double frame_shift_s = 0.005);

/// Static features: per-frame mel-cepstrum plus the multi-space log-F0 value.
FeatureSequence analyze(const AudioBuffer& audio, const AnalysisConfig& cfg);

/// Append delta and delta-delta streams. Boundary frames replicate edge
/// values. lf0 deltas exist only on voiced runs of length >= 3; frames in
/// shorter runs become unvoiced in the returned sequence.
FeatureSequence compute_deltas(const FeatureSequence& seq);

void write_features(const FeatureSequence& seq, const std::filesystem::path& path);
FeatureSequence read_features(const std::filesystem::path& path);
void dump_features_text(const FeatureSequence& seq, std::ostream& out);

}  // namespace voz
