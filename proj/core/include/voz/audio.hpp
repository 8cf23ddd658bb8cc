#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace voz {

/// Mono PCM signal. Samples live in [-1, 1]; the WAV layer quantizes to
/// 16-bit integers on write and scales back by 1/32768 on read.
struct AudioBuffer {
    std::vector<double> samples;
    uint32_t sample_rate = 0;

    double duration_s() const {
        return sample_rate ? double(samples.size()) / double(sample_rate) : 0.0;
    }
};

/// Read a RIFF/WAV file. Only 16-bit integer PCM is accepted; multi-channel
/// input is mixed down by averaging channels.
AudioBuffer read_wav(const std::filesystem::path& path);

/// Write mono 16-bit PCM at the buffer's sample rate. Values are clamped
/// to [-1, 1] before quantization.
void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path);

}  // namespace voz
