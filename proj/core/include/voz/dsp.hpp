#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace voz::dsp {

std::size_t next_pow2(std::size_t n);

/// In-place iterative radix-2 FFT. data.size() must be a power of two.
/// The inverse transform includes the 1/N factor.
void fft(std::vector<std::complex<double>>& data, bool inverse);

/// Forward FFT of a real signal zero-padded (or truncated) to nfft samples.
std::vector<std::complex<double>> rfft(std::span<const double> signal, std::size_t nfft);

std::vector<double> hamming_window(std::size_t length);

}  // namespace voz::dsp
