#include "voz/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "voz/error.hpp"

namespace voz {

namespace {

uint32_t read_u32le(const unsigned char* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

uint16_t read_u16le(const unsigned char* p) {
    return uint16_t(p[0] | p[1] << 8);
}

void put_u32le(std::string& out, uint32_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char((v >> 8) & 0xff));
    out.push_back(char((v >> 16) & 0xff));
    out.push_back(char((v >> 24) & 0xff));
}

void put_u16le(std::string& out, uint16_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char((v >> 8) & 0xff));
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open WAV file: " + path.string());

    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const size_t n = bytes.size();

    if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw Error("malformed RIFF header: " + path.string());

    bool have_fmt = false;
    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    size_t data_off = 0, data_len = 0;
    bool have_data = false;

    size_t off = 12;
    while (off + 8 <= n) {
        const char* id = bytes.data() + off;
        const uint32_t sz = read_u32le(p + off + 4);
        const size_t body = off + 8;
        if (body + sz > n) throw Error("malformed RIFF header: truncated chunk in " + path.string());
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (sz < 16) throw Error("malformed RIFF header: short fmt chunk in " + path.string());
            format = read_u16le(p + body);
            channels = read_u16le(p + body + 2);
            rate = read_u32le(p + body + 4);
            bits = read_u16le(p + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = sz;
            have_data = true;
        }
        off = body + sz + (sz & 1);  // chunks are word-aligned
    }

    if (!have_fmt || !have_data)
        throw Error("malformed RIFF header: missing fmt or data chunk in " + path.string());
    if (format != 1 || bits != 16)
        throw Error("unsupported WAV encoding (only 16-bit integer PCM): " + path.string());
    if (channels == 0 || rate == 0)
        throw Error("malformed RIFF header: bad fmt fields in " + path.string());
    if (data_len == 0)
        throw Error("zero-length data chunk: " + path.string());

    const size_t bytes_per_frame = size_t(channels) * 2;
    const size_t frames = data_len / bytes_per_frame;

    AudioBuffer buf;
    buf.sample_rate = rate;
    buf.samples.resize(frames);
    const unsigned char* d = p + data_off;
    for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (uint16_t c = 0; c < channels; ++c) {
            const int16_t s = int16_t(read_u16le(d + i * bytes_per_frame + 2 * c));
            acc += double(s);
        }
        buf.samples[i] = acc / (32768.0 * double(channels));
    }
    return buf;
}

void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path) {
    if (buffer.sample_rate == 0) throw Error("write_wav: sample rate must be positive");

    const uint32_t n = uint32_t(buffer.samples.size());
    const uint32_t data_bytes = n * 2;

    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32le(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32le(out, 16);
    put_u16le(out, 1);                        // PCM
    put_u16le(out, 1);                        // mono
    put_u32le(out, buffer.sample_rate);
    put_u32le(out, buffer.sample_rate * 2);   // byte rate
    put_u16le(out, 2);                        // block align
    put_u16le(out, 16);                       // bits per sample
    out += "data";
    put_u32le(out, data_bytes);

    for (double x : buffer.samples) {
        double v = std::clamp(x, -1.0, 1.0);
        long q = std::lround(v * 32768.0);
        q = std::clamp(q, -32768L, 32767L);
        put_u16le(out, uint16_t(int16_t(q)));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open for writing: " + path.string());
    f.write(out.data(), std::streamsize(out.size()));
    if (!f) throw Error("write failed: " + path.string());
}

}  // namespace voz
