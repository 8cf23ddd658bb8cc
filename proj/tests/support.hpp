// Shared test helpers: scratch directories, deterministic signal generators,
// the synthetic toy corpus, and independent numerical oracles.
#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "voz/audio.hpp"
#include "voz/corpus.hpp"

namespace test_support {

// Fresh scratch directory under the system temp dir, wiped on construction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() / ("voz_test_" + name)) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline double uniform(std::mt19937_64& gen) { return double(gen() >> 11) * 0x1.0p-53; }

inline voz::AudioBuffer sine(double freq_hz, double seconds, double amplitude = 0.5,
                             uint32_t rate = 16000) {
    voz::AudioBuffer buf;
    buf.sample_rate = rate;
    const size_t n = size_t(seconds * rate);
    buf.samples.resize(n);
    for (size_t i = 0; i < n; ++i)
        buf.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * double(i) / rate);
    return buf;
}

inline voz::AudioBuffer silence(double seconds, uint32_t rate = 16000) {
    return {std::vector<double>(size_t(seconds * rate), 0.0), rate};
}

inline voz::AudioBuffer white_noise(double seconds, double amplitude, uint64_t seed,
                                    uint32_t rate = 16000) {
    voz::AudioBuffer buf;
    buf.sample_rate = rate;
    buf.samples.resize(size_t(seconds * rate));
    std::mt19937_64 gen(seed);
    for (double& s : buf.samples) s = amplitude * (2.0 * uniform(gen) - 1.0);
    return buf;
}

// Pulse train through two resonators: a deterministic vowel-like signal.
inline voz::AudioBuffer synthetic_vowel(double f0_hz, double seconds, uint32_t rate = 16000,
                                        double formant1 = 700.0, double formant2 = 1200.0) {
    const size_t n = size_t(seconds * rate);
    std::vector<double> excitation(n, 0.0);
    const double period = double(rate) / f0_hz;
    for (double pos = 0.0; pos < double(n); pos += period)
        excitation[size_t(pos)] = 1.0;

    // two cascaded two-pole resonators
    std::vector<double> y = excitation;
    for (double formant : {formant1, formant2}) {
        const double bw = 120.0;
        const double r = std::exp(-std::numbers::pi * bw / rate);
        const double theta = 2.0 * std::numbers::pi * formant / rate;
        const double a1 = -2.0 * r * std::cos(theta);
        const double a2 = r * r;
        double y1 = 0.0, y2 = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double v = y[i] - a1 * y1 - a2 * y2;
            y[i] = v;
            y2 = y1;
            y1 = v;
        }
    }
    double peak = 0.0;
    for (double v : y) peak = std::max(peak, std::abs(v));
    voz::AudioBuffer buf;
    buf.sample_rate = rate;
    buf.samples.resize(n);
    for (size_t i = 0; i < n; ++i) buf.samples[i] = 0.7 * y[i] / peak;
    return buf;
}

// Speech-like toy utterance: voiced vowel-ish segments alternating with
// noise bursts and silence, deterministic per seed.
inline voz::AudioBuffer toy_utterance(uint64_t seed, double seconds = 1.6,
                                      uint32_t rate = 16000) {
    std::mt19937_64 gen(seed);
    const size_t n = size_t(seconds * rate);
    voz::AudioBuffer buf;
    buf.sample_rate = rate;
    buf.samples.assign(n, 0.0);

    size_t pos = size_t(0.05 * rate);  // leading silence
    while (pos < n) {
        const double pick = uniform(gen);
        const size_t seg = size_t((0.08 + 0.12 * uniform(gen)) * rate);
        const size_t end = std::min(n, pos + seg);
        if (pick < 0.55) {  // voiced segment
            const double f0 = 100.0 + 150.0 * uniform(gen);
            const double formant = 500.0 + 1500.0 * uniform(gen);
            const double r = std::exp(-std::numbers::pi * 150.0 / rate);
            const double a1 = -2.0 * r * std::cos(2.0 * std::numbers::pi * formant / rate);
            const double a2 = r * r;
            double y1 = 0.0, y2 = 0.0, phase = 0.0;
            const double period = rate / f0;
            for (size_t i = pos; i < end; ++i) {
                double e = 0.0;
                if (phase <= 0.0) {
                    e = 1.0;
                    phase += period;
                }
                phase -= 1.0;
                const double v = e - a1 * y1 - a2 * y2;
                buf.samples[i] = 0.25 * v;
                y2 = y1;
                y1 = v;
            }
        } else if (pick < 0.8) {  // unvoiced burst
            for (size_t i = pos; i < end; ++i)
                buf.samples[i] = 0.08 * (2.0 * uniform(gen) - 1.0);
        }  // else: silence
        pos = end;
    }
    double peak = 0.0;
    for (double v : buf.samples) peak = std::max(peak, std::abs(v));
    if (peak > 0.9)
        for (double& v : buf.samples) v *= 0.9 / peak;
    return buf;
}

// Ten-utterance toy corpus written as WAV files plus a manifest.
inline std::string write_toy_corpus(const std::filesystem::path& dir) {
    const char* texts[10] = {"pala",   "tortuga", "cuello pala", "nariz",  "gallina",
                             "basura", "escoba",  "dedos",       "tortuga silla", "diente"};
    std::filesystem::create_directories(dir / "wav");
    const std::string manifest = (dir / "manifest.tsv").string();
    std::ofstream out(manifest, std::ios::trunc);
    out << "# toy corpus\n";
    for (int i = 0; i < 10; ++i) {
        const std::string id = "u" + std::to_string(i);
        const std::string wav = "wav/" + id + ".wav";
        const double seconds = 1.4 + 0.12 * (i % 4);
        voz::write_wav(toy_utterance(1000 + uint64_t(i), seconds), dir / wav);
        out << id << '\t' << wav << '\t' << texts[i] << "\tspk" << (i % 3) << '\t'
            << (i % 2 ? "adult" : "child") << '\t' << (i % 3 ? "feminine" : "masculine")
            << '\n';
    }
    return manifest;
}

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

// Real cepstrum of a frame via a naive O(n^2) DFT (no shared code with the
// library FFT path), with the same -60 dB / 1e-10 flooring rule.
inline std::vector<double> naive_real_cepstrum(const std::vector<double>& frame, int order) {
    size_t nfft = 1;
    while (nfft < frame.size()) nfft <<= 1;
    std::vector<double> logmag(nfft);
    double peak = 0.0;
    for (size_t k = 0; k < nfft; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (size_t m = 0; m < frame.size(); ++m) {
            const double ang = -2.0 * std::numbers::pi * double(k) * double(m) / double(nfft);
            acc += frame[m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        logmag[k] = std::abs(acc);
        peak = std::max(peak, logmag[k]);
    }
    const double floor_mag = std::max(peak * std::pow(10.0, -60.0 / 20.0), 1e-10);
    for (double& v : logmag) v = std::log(std::max(std::max(v, 1e-10), floor_mag));

    std::vector<double> c(size_t(order) + 1, 0.0);
    for (int m = 0; m <= order; ++m) {
        double acc = 0.0;
        for (size_t k = 0; k < nfft; ++k)
            acc += logmag[k] * std::cos(2.0 * std::numbers::pi * double(k) * double(m) / double(nfft));
        c[size_t(m)] = acc / double(nfft);
    }
    return c;
}

// Dense solve of A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (size_t r = n; r-- > 0;) {
        double s = b[r];
        for (size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
        x[r] = s / a[r][r];
    }
    return x;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline int run_cli(const std::string& args) {
    const std::string cmd = std::string(VOZ_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return status < 0 ? status : WEXITSTATUS(status);
}

}  // namespace test_support
