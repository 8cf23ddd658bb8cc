#include "voz/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace voz::dsp {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::logic_error("fft: size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / double(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (inverse) {
        const double inv_n = 1.0 / double(n);
        for (auto& x : data) x *= inv_n;
    }
}

std::vector<std::complex<double>> rfft(std::span<const double> signal, std::size_t nfft) {
    std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
    const std::size_t m = std::min(signal.size(), nfft);
    for (std::size_t i = 0; i < m; ++i) buf[i] = {signal[i], 0.0};
    fft(buf, false);
    return buf;
}

std::vector<double> hamming_window(std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (length < 2) return w;
    for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * double(n) / double(length - 1));
    return w;
}

}  // namespace voz::dsp
