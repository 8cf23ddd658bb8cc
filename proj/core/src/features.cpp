#include "voz/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>

#include "voz/dsp.hpp"
#include "voz/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "feature files are little-endian; this build assumes a little-endian host");

namespace voz {

namespace {

constexpr double kLogFloorDb = -60.0;            // spectrum floor below frame peak
constexpr double kAbsMagnitudeFloor = 1e-10;     // floor for silent frames
constexpr double kVoicingThreshold = 0.3;        // normalized autocorrelation
constexpr double kVoicingRmsGate = 1e-4;
constexpr double kPeakTolerance = 0.9;           // octave guard: accept earliest peak near max

size_t frame_samples(double seconds, uint32_t rate) {
    return size_t(std::llround(seconds * double(rate)));
}

// first-order all-pass frequency warp; alpha=0 is the identity
double warp_frequency(double omega, double alpha) {
    return omega + 2.0 * std::atan2(alpha * std::sin(omega), 1.0 - alpha * std::cos(omega));
}

}  // namespace

std::vector<std::vector<double>> frame_signal(const AudioBuffer& audio, double frame_length_s,
                                              double frame_shift_s) {
    if (!(frame_length_s >= frame_shift_s && frame_shift_s > 0.0))
        throw Error("frame_signal: need frame_length >= frame_shift > 0");
    const size_t L = frame_samples(frame_length_s, audio.sample_rate);
    const size_t S = frame_samples(frame_shift_s, audio.sample_rate);
    if (L == 0 || S == 0) throw Error("frame_signal: frame too short for sample rate");
    const size_t N = audio.samples.size();
    if (N < L) throw Error("frame_signal: audio shorter than one frame");

    const size_t count = (N - L) / S + 1;
    const std::vector<double> window = dsp::hamming_window(L);

    std::vector<std::vector<double>> frames(count);
    for (size_t t = 0; t < count; ++t) {
        frames[t].resize(L);
        const double* src = audio.samples.data() + t * S;
        for (size_t n = 0; n < L; ++n) frames[t][n] = src[n] * window[n];
    }
    return frames;
}

std::vector<double> mel_cepstrum(std::span<const double> windowed_frame, int order, double alpha) {
    if (order < 1) throw Error("mel_cepstrum: order must be >= 1");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw Error("mel_cepstrum: alpha must be in [0,1)");
    if (windowed_frame.empty()) throw Error("mel_cepstrum: empty frame");

    std::vector<double> c(size_t(order) + 1, 0.0);

    const bool all_zero =
        std::all_of(windowed_frame.begin(), windowed_frame.end(), [](double x) { return x == 0.0; });
    if (all_zero) {
        c[0] = std::log(kAbsMagnitudeFloor);  // flat floor spectrum, only the DC term
        return c;
    }

    const size_t nfft = dsp::next_pow2(windowed_frame.size());
    const size_t half = nfft / 2;
    const auto spec = dsp::rfft(windowed_frame, nfft);

    // log magnitude, floored at -60 dB relative to the frame peak
    std::vector<double> logmag(half + 1);
    double peak = 0.0;
    for (size_t k = 0; k <= half; ++k) peak = std::max(peak, std::abs(spec[k]));
    const double floor_mag = std::max(peak * std::pow(10.0, kLogFloorDb / 20.0), kAbsMagnitudeFloor);
    const double log_floor = std::log(floor_mag);
    for (size_t k = 0; k <= half; ++k)
        logmag[k] = std::max(std::log(std::max(std::abs(spec[k]), kAbsMagnitudeFloor)), log_floor);

    // resample onto the uniformly-spaced warped grid: the value at warped
    // frequency w~ is the plain spectrum at the inverse-warped frequency,
    // and the inverse of the all-pass map is the same map with -alpha
    std::vector<double> warped(half + 1);
    for (size_t k = 0; k <= half; ++k) {
        const double omega_tilde = std::numbers::pi * double(k) / double(half);
        const double omega = warp_frequency(omega_tilde, -alpha);
        double pos = omega / std::numbers::pi * double(half);
        pos = std::clamp(pos, 0.0, double(half));
        const size_t k0 = size_t(pos) < half ? size_t(pos) : half - 1;
        const double frac = pos - double(k0);
        warped[k] = (1.0 - frac) * logmag[k0] + frac * logmag[k0 + 1];
    }

    // inverse cosine transform of the symmetric log spectrum
    const double inv_n = 1.0 / double(nfft);
    for (int m = 0; m <= order; ++m) {
        double acc = warped[0];
        for (size_t k = 1; k < half; ++k)
            acc += 2.0 * warped[k] * std::cos(std::numbers::pi * double(k) * double(m) / double(half));
        acc += (m % 2 == 0 ? 1.0 : -1.0) * warped[half];
        c[size_t(m)] = acc * inv_n;
    }
    return c;
}

std::vector<F0Frame> extract_f0(const AudioBuffer& audio, double f0_min, double f0_max,
                                double frame_length_s, double frame_shift_s) {
    if (!(0.0 < f0_min && f0_min < f0_max && f0_max < double(audio.sample_rate) / 2.0))
        throw Error("extract_f0: need 0 < fmin < fmax < sample_rate/2");

    const uint32_t rate = audio.sample_rate;
    const size_t L = frame_samples(frame_length_s, rate);
    const size_t S = frame_samples(frame_shift_s, rate);
    const size_t N = audio.samples.size();
    if (N < L) return {};

    const size_t lag_min = std::max<size_t>(2, size_t(std::floor(double(rate) / f0_max)));
    const size_t lag_max = size_t(std::ceil(double(rate) / f0_min));
    const size_t count = (N - L) / S + 1;

    const auto sample = [&](size_t idx) { return idx < N ? audio.samples[idx] : 0.0; };

    std::vector<F0Frame> track(count);
    std::vector<double> r(lag_max + 2, 0.0);
    for (size_t t = 0; t < count; ++t) {
        const size_t base = t * S;

        double energy0 = 0.0;
        for (size_t n = 0; n < L; ++n) energy0 += sample(base + n) * sample(base + n);
        const double rms = std::sqrt(energy0 / double(L));
        if (rms < kVoicingRmsGate) continue;

        // normalized cross-correlation over the candidate lag range
        double best = 0.0;
        for (size_t tau = lag_min; tau <= lag_max + 1; ++tau) {
            double cross = 0.0, energy_tau = 0.0;
            for (size_t n = 0; n < L; ++n) {
                const double a = sample(base + n);
                const double b = sample(base + n + tau);
                cross += a * b;
                energy_tau += b * b;
            }
            const double denom = std::sqrt(energy0 * energy_tau);
            r[tau] = denom > 0.0 ? cross / denom : 0.0;
            if (tau <= lag_max) best = std::max(best, r[tau]);
        }
        if (best < kVoicingThreshold) continue;

        // earliest local peak close to the global maximum, to avoid locking
        // onto a period multiple
        size_t pick = 0;
        for (size_t tau = lag_min; tau <= lag_max; ++tau) {
            const double left = tau > lag_min ? r[tau - 1] : -2.0;
            const double right = r[tau + 1];
            if (r[tau] >= left && r[tau] >= right && r[tau] >= kPeakTolerance * best) {
                pick = tau;
                break;
            }
        }
        if (pick == 0) continue;

        double lag = double(pick);
        if (pick > lag_min && pick < lag_max) {  // parabolic refinement
            const double denom = r[pick - 1] - 2.0 * r[pick] + r[pick + 1];
            if (denom < 0.0) lag += 0.5 * (r[pick - 1] - r[pick + 1]) / denom;
        }
        const double f0 = double(rate) / lag;
        if (f0 >= f0_min && f0 <= f0_max) track[t] = {true, f0};
    }

    // 3-point median smoothing inside each voiced run
    std::vector<F0Frame> smoothed = track;
    for (size_t t = 0; t < count; ++t) {
        if (!track[t].voiced) continue;
        std::vector<double> win;
        if (t > 0 && track[t - 1].voiced) win.push_back(track[t - 1].f0_hz);
        win.push_back(track[t].f0_hz);
        if (t + 1 < count && track[t + 1].voiced) win.push_back(track[t + 1].f0_hz);
        std::sort(win.begin(), win.end());
        smoothed[t].f0_hz = win.size() == 3 ? win[1]
                          : win.size() == 2 ? 0.5 * (win[0] + win[1])
                                            : win[0];
    }
    return smoothed;
}

FeatureSequence analyze(const AudioBuffer& audio, const AnalysisConfig& cfg) {
    if (audio.sample_rate != cfg.sample_rate)
        throw Error("analyze: audio is " + std::to_string(audio.sample_rate) +
                    " Hz, config expects " + std::to_string(cfg.sample_rate) + " Hz");

    const auto frames = frame_signal(audio, cfg.frame_length_s, cfg.frame_shift_s);
    const auto f0 = extract_f0(audio, cfg.f0_min, cfg.f0_max, cfg.frame_length_s,
                               cfg.frame_shift_s);

    FeatureSequence seq;
    seq.frame_shift_s = cfg.frame_shift_s;
    seq.sample_rate = cfg.sample_rate;
    seq.order = cfg.order;
    seq.has_deltas = false;
    seq.frames.resize(frames.size());
    for (size_t t = 0; t < frames.size(); ++t) {
        FrameVector& fv = seq.frames[t];
        fv.mcep = mel_cepstrum(frames[t], cfg.order, cfg.alpha);
        if (t < f0.size() && f0[t].voiced) {
            fv.voiced = true;
            fv.lf0 = {std::log(f0[t].f0_hz), 0.0, 0.0};
        }
    }
    return seq;
}

namespace {

// Dx_t = 0.5 (x_{t+1} - x_{t-1}); DDx_t = x_{t+1} - 2 x_t + x_{t-1},
// with edge replication at run boundaries.
void append_deltas(const std::vector<double>& x, std::vector<double>& d,
                   std::vector<double>& dd) {
    const size_t n = x.size();
    d.resize(n);
    dd.resize(n);
    for (size_t t = 0; t < n; ++t) {
        const double prev = t > 0 ? x[t - 1] : x[0];
        const double next = t + 1 < n ? x[t + 1] : x[n - 1];
        d[t] = 0.5 * (next - prev);
        dd[t] = next - 2.0 * x[t] + prev;
    }
}

}  // namespace

FeatureSequence compute_deltas(const FeatureSequence& seq) {
    if (seq.frames.empty()) throw Error("compute_deltas: empty sequence");
    if (seq.has_deltas) throw Error("compute_deltas: sequence already carries deltas");

    const size_t T = seq.frames.size();
    const size_t D = size_t(seq.order) + 1;
    for (const FrameVector& fv : seq.frames)
        if (fv.mcep.size() != D)
            throw Error("compute_deltas: frame dimension does not match the order");

    FeatureSequence out = seq;
    out.has_deltas = true;

    // spectral stream, one dimension at a time over the full utterance
    std::vector<double> x(T), d, dd;
    for (auto& fv : out.frames) fv.mcep.resize(3 * D, 0.0);
    for (size_t m = 0; m < D; ++m) {
        for (size_t t = 0; t < T; ++t) x[t] = seq.frames[t].mcep[m];
        append_deltas(x, d, dd);
        for (size_t t = 0; t < T; ++t) {
            out.frames[t].mcep[D + m] = d[t];
            out.frames[t].mcep[2 * D + m] = dd[t];
        }
    }

    // lf0 stream: deltas only exist on voiced runs of >= 3 frames; frames in
    // shorter runs lose their voiced flag for modeling purposes
    size_t t = 0;
    while (t < T) {
        if (!seq.frames[t].voiced) {
            out.frames[t].voiced = false;
            out.frames[t].lf0 = {0.0, 0.0, 0.0};
            ++t;
            continue;
        }
        size_t end = t;
        while (end < T && seq.frames[end].voiced) ++end;
        const size_t run = end - t;
        if (run < 3) {
            for (size_t k = t; k < end; ++k) {
                out.frames[k].voiced = false;
                out.frames[k].lf0 = {0.0, 0.0, 0.0};
            }
        } else {
            std::vector<double> rx(run), rd, rdd;
            for (size_t k = 0; k < run; ++k) rx[k] = seq.frames[t + k].lf0[0];
            append_deltas(rx, rd, rdd);
            for (size_t k = 0; k < run; ++k)
                out.frames[t + k].lf0 = {rx[k], rd[k], rdd[k]};
        }
        t = end;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization: little-endian binary with a short header, plus a text dump.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'V', 'O', 'Z', 'F'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error("truncated feature file");
    return v;
}

}  // namespace

void write_features(const FeatureSequence& seq, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());

    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, uint32_t(seq.order));
    put(out, uint32_t(seq.has_deltas ? 1 : 0));
    put(out, seq.sample_rate);
    put(out, seq.frame_shift_s);
    put(out, uint64_t(seq.frames.size()));

    const size_t dim = seq.spectral_dim();
    for (const FrameVector& fv : seq.frames) {
        if (fv.mcep.size() != dim) throw Error("write_features: inconsistent frame dimension");
        out.write(reinterpret_cast<const char*>(fv.mcep.data()),
                  std::streamsize(dim * sizeof(double)));
        put(out, uint8_t(fv.voiced ? 1 : 0));
        out.write(reinterpret_cast<const char*>(fv.lf0.data()), 3 * sizeof(double));
    }
    if (!out) throw Error("write failed: " + path.string());
}

FeatureSequence read_features(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open feature file: " + path.string());

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw Error("not a feature file: " + path.string());
    if (get<uint32_t>(in) != kVersion) throw Error("unsupported feature file version");

    FeatureSequence seq;
    seq.order = int(get<uint32_t>(in));
    seq.has_deltas = get<uint32_t>(in) != 0;
    seq.sample_rate = get<uint32_t>(in);
    seq.frame_shift_s = get<double>(in);
    const uint64_t count = get<uint64_t>(in);

    const size_t dim = seq.spectral_dim();
    seq.frames.resize(count);
    for (FrameVector& fv : seq.frames) {
        fv.mcep.resize(dim);
        in.read(reinterpret_cast<char*>(fv.mcep.data()), std::streamsize(dim * sizeof(double)));
        fv.voiced = get<uint8_t>(in) != 0;
        in.read(reinterpret_cast<char*>(fv.lf0.data()), 3 * sizeof(double));
        if (!in) throw Error("truncated feature file: " + path.string());
    }
    return seq;
}

void dump_features_text(const FeatureSequence& seq, std::ostream& out) {
    out << "# order " << seq.order << " shift " << seq.frame_shift_s << " rate "
        << seq.sample_rate << " deltas " << (seq.has_deltas ? 1 : 0) << " frames "
        << seq.frames.size() << '\n';
    char buf[40];
    for (size_t t = 0; t < seq.frames.size(); ++t) {
        const FrameVector& fv = seq.frames[t];
        out << t;
        for (double v : fv.mcep) {
            std::snprintf(buf, sizeof buf, " %.8g", v);
            out << buf;
        }
        out << (fv.voiced ? " V" : " U");
        if (fv.voiced) {
            for (double v : fv.lf0) {
                std::snprintf(buf, sizeof buf, " %.8g", v);
                out << buf;
            }
        }
        out << '\n';
    }
}

}  // namespace voz
