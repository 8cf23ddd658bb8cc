#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "voz/audio.hpp"

namespace voz {

enum class AgeGroup { child, adult };
enum class Gender { masculine, feminine };

std::string to_string(AgeGroup g);
std::string to_string(Gender g);
AgeGroup parse_age_group(const std::string& token);
Gender parse_gender(const std::string& token);

struct Utterance {
    std::string id;
    std::string audio_path;  // may be relative to Corpus::root
    std::string text;
    std::string speaker_id;
    AgeGroup age_group = AgeGroup::child;
    Gender gender = Gender::feminine;
};

struct Corpus {
    std::vector<Utterance> utterances;
    std::filesystem::path root;  // base for relative audio paths
};

// Pipeline audio format: mono 16-bit PCM at 16 kHz. No resampler is provided;
// other rates are reported by validation and rejected by training.
inline constexpr uint32_t kCanonicalSampleRate = 16000;
inline constexpr double kClipLevel = 0.999;
inline constexpr double kClipRatioLimit = 0.01;
inline constexpr double kMinUtteranceSeconds = 0.1;

/// Load a manifest: UTF-8, one record per line, tab-separated fields
/// `id, audio_path, text, speaker_id, age_group, gender`; '#' lines are
/// comments. Referenced audio is not opened here.
Corpus load_manifest(const std::filesystem::path& path);

AudioBuffer load_utterance_audio(const Corpus& corpus, const Utterance& utt);

struct UtteranceReport {
    std::string id;
    bool audio_ok = false;
    std::string audio_error;     // set when !audio_ok
    uint32_t sample_rate = 0;
    double duration_s = 0.0;
    double clipping_ratio = 0.0;
    bool clipping_flag = false;  // clipping ratio above limit
    bool short_flag = false;     // duration below minimum
    std::string bad_chars;       // transcription characters outside the normalizer alphabet

    // Flags that make the utterance unusable for training.
    bool fatal() const { return !audio_ok || !bad_chars.empty(); }
};

struct ValidationReport {
    std::vector<UtteranceReport> rows;

    bool any_fatal() const;
    void write_text(std::ostream& out) const;
    void write_csv(std::ostream& out) const;
};

/// Per-utterance checks: readable canonical-rate audio, clipping ratio,
/// minimum duration, transcription alphabet. Never mutates the corpus.
ValidationReport validate_corpus(const Corpus& corpus);

}  // namespace voz
