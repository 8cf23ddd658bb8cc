#include "voz/vocoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "voz/dsp.hpp"
#include "voz/error.hpp"

namespace voz {

namespace {

constexpr double kPeakNorm = 0.9;
// Signals whose raw peak sits at the spectral floor (silence analyzed and
// resynthesized) pass through unscaled instead of amplifying the floor.
constexpr double kNormalizeFloor = 1e-6;

// uniform double in [0,1) from the top 53 bits, stdlib-independent
double next_uniform(std::mt19937_64& gen) {
    return double(gen() >> 11) * 0x1.0p-53;
}

double warp_frequency(double omega, double alpha) {
    return omega + 2.0 * std::atan2(alpha * std::sin(omega), 1.0 - alpha * std::cos(omega));
}

}  // namespace

std::vector<double> build_excitation(std::span<const F0Frame> contour, double frame_shift_s,
                                     uint32_t sample_rate, uint64_t seed, double f0_min,
                                     double f0_max, ExcitationStats* stats) {
    const std::size_t shift = std::size_t(std::llround(frame_shift_s * double(sample_rate)));
    if (shift == 0) throw Error("build_excitation: frame shift too short");

    std::vector<double> excitation(contour.size() * shift, 0.0);
    std::mt19937_64 gen(seed);
    const double noise_scale = std::sqrt(3.0);  // uniform in [-sqrt(3), sqrt(3)]: unit variance

    int clamped = 0;
    double to_next_pulse = 0.0;
    bool in_voiced_run = false;

    for (std::size_t t = 0; t < contour.size(); ++t) {
        double* frame = excitation.data() + t * shift;
        if (!contour[t].voiced) {
            in_voiced_run = false;
            for (std::size_t n = 0; n < shift; ++n)
                frame[n] = (2.0 * next_uniform(gen) - 1.0) * noise_scale;
            continue;
        }

        double f0 = contour[t].f0_hz;
        if (f0 < f0_min || f0 > f0_max) {
            f0 = std::clamp(f0, f0_min, f0_max);
            ++clamped;
        }
        const double period = double(sample_rate) / f0;
        if (!in_voiced_run) {
            to_next_pulse = 0.0;  // pulse lands at the run start
            in_voiced_run = true;
        }
        for (std::size_t n = 0; n < shift; ++n) {
            if (to_next_pulse <= 0.0) {
                frame[n] = std::sqrt(period);
                to_next_pulse += period;
            }
            to_next_pulse -= 1.0;
        }
    }

    if (stats) stats->clamped_frames = clamped;
    return excitation;
}

std::vector<double> synthesize_raw(const std::vector<std::vector<double>>& mcep,
                                   std::span<const double> excitation, double alpha,
                                   uint32_t sample_rate, double frame_shift_s) {
    const std::size_t T = mcep.size();
    const std::size_t shift = std::size_t(std::llround(frame_shift_s * double(sample_rate)));
    if (shift == 0) throw Error("synthesize: frame shift too short");
    if (excitation.size() != T * shift)
        throw Error("synthesize: excitation length " + std::to_string(excitation.size()) +
                    " does not match " + std::to_string(T) + " frames x " +
                    std::to_string(shift) + " samples");
    if (T == 0) return {};

    // impulse-response grid mirrors the 25 ms analysis window resolution
    const std::size_t nfft = dsp::next_pow2(std::size_t(std::llround(0.025 * sample_rate)));
    const std::size_t half = nfft / 2;

    // warped-grid positions of the uniform frequency bins (inverse of the
    // analysis resampling)
    std::vector<double> grid_pos(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        const double omega = std::numbers::pi * double(k) / double(half);
        grid_pos[k] = std::clamp(warp_frequency(omega, alpha) / std::numbers::pi * double(half),
                                 0.0, double(half));
    }

    std::vector<double> out(T * shift + nfft, 0.0);
    std::vector<double> warped_log(half + 1), log_spec(half + 1);
    std::vector<std::complex<double>> buf(nfft);

    for (std::size_t t = 0; t < T; ++t) {
        const std::vector<double>& c = mcep[t];

        // cepstrum -> log spectral envelope on the warped grid
        for (std::size_t k = 0; k <= half; ++k) {
            double acc = c[0];
            const double step = std::numbers::pi * double(k) / double(half);
            for (std::size_t m = 1; m < c.size(); ++m)
                acc += 2.0 * c[m] * std::cos(step * double(m));
            warped_log[k] = acc;
        }

        // unwarp back onto the uniform grid
        for (std::size_t k = 0; k <= half; ++k) {
            const double pos = grid_pos[k];
            const std::size_t k0 = std::size_t(pos) < half ? std::size_t(pos) : half - 1;
            const double frac = pos - double(k0);
            log_spec[k] = (1.0 - frac) * warped_log[k0] + frac * warped_log[k0 + 1];
        }

        // real cepstrum of the envelope, folded into a minimum-phase cepstrum
        for (std::size_t k = 0; k < nfft; ++k) {
            const std::size_t sym = k <= half ? k : nfft - k;
            buf[k] = {log_spec[sym], 0.0};
        }
        dsp::fft(buf, true);
        std::vector<double> minphase(nfft, 0.0);
        minphase[0] = buf[0].real();
        for (std::size_t n = 1; n < half; ++n) minphase[n] = 2.0 * buf[n].real();
        minphase[half] = buf[half].real();

        // H = exp(FFT(minphase cepstrum)), h = IFFT(H)
        for (std::size_t k = 0; k < nfft; ++k) buf[k] = {minphase[k], 0.0};
        dsp::fft(buf, false);
        for (std::size_t k = 0; k < nfft; ++k) buf[k] = std::exp(buf[k]);
        dsp::fft(buf, true);

        // filter this frame's excitation hop and overlap-add the tail
        const double* exc = excitation.data() + t * shift;
        double* dst = out.data() + t * shift;
        for (std::size_t n = 0; n < shift; ++n) {
            const double e = exc[n];
            if (e == 0.0) continue;
            for (std::size_t k = 0; k < nfft; ++k) dst[n + k] += e * buf[k].real();
        }
    }

    out.resize(T * shift);
    return out;
}

AudioBuffer synthesize(const std::vector<std::vector<double>>& mcep,
                       std::span<const double> excitation, double alpha, uint32_t sample_rate,
                       double frame_shift_s, SynthesisStats* stats) {
    std::vector<double> raw = synthesize_raw(mcep, excitation, alpha, sample_rate, frame_shift_s);
    double peak = 0.0;
    for (double v : raw) peak = std::max(peak, std::abs(v));
    if (stats) stats->raw_peak = peak;
    if (peak > kNormalizeFloor) {
        const double scale = kPeakNorm / peak;
        for (double& v : raw) v *= scale;
    }
    return AudioBuffer{std::move(raw), sample_rate};
}

AudioBuffer copy_synthesis(const AudioBuffer& audio, const AnalysisConfig& cfg, uint64_t seed,
                           SynthesisStats* stats) {
    const FeatureSequence features = analyze(audio, cfg);

    std::vector<F0Frame> contour(features.frames.size());
    std::vector<std::vector<double>> mcep(features.frames.size());
    for (std::size_t t = 0; t < features.frames.size(); ++t) {
        const FrameVector& fv = features.frames[t];
        mcep[t] = fv.mcep;
        if (fv.voiced) contour[t] = {true, std::exp(fv.lf0[0])};
    }

    const std::vector<double> excitation = build_excitation(
        contour, cfg.frame_shift_s, cfg.sample_rate, seed, cfg.f0_min, cfg.f0_max);
    return synthesize(mcep, excitation, cfg.alpha, cfg.sample_rate, cfg.frame_shift_s, stats);
}

}  // namespace voz
