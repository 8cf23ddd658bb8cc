#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "voz/corpus.hpp"

namespace voz {

enum class VoiceType { artificial, natural };
enum class Criterion { age, gender, transcription };

std::string to_string(VoiceType v);
std::string to_string(Criterion c);
VoiceType parse_voice_type(const std::string& token);
Criterion parse_criterion(const std::string& token);

/// One rated audio. The truths a listening set does not rate stay unset.
struct EvalItem {
    std::string audio_id;
    VoiceType voice_type = VoiceType::natural;
    std::optional<AgeGroup> truth_age;
    std::optional<Gender> truth_gender;
    std::string truth_word;  // empty when the item has no transcription truth
};

/// One rater's answer for one audio under one criterion. For age/gender the
/// answer is child|adult|masculine|feminine|undetermined; for transcription
/// it is free text.
struct ListeningResponse {
    std::string rater_id;
    std::string audio_id;
    Criterion criterion = Criterion::age;
    std::string answer;
};

struct TallyRow {
    std::string audio_id;
    int hits = 0;
    int misses = 0;
    int undetermined = 0;  // always 0 for transcription
    VoiceType voice_type = VoiceType::natural;
};

/// Case-, accent- and punctuation-insensitive exact match; an empty answer
/// counts as incorrect (no answer means the word was not understood).
bool score_transcription(const std::string& truth_word, const std::string& answer);

/// Per-audio counts for one criterion, in item order. Items lacking the
/// criterion's truth are excluded; responses referencing unknown audios or
/// carrying mismatched answers are errors.
std::vector<TallyRow> tally(const std::vector<EvalItem>& items,
                            const std::vector<ListeningResponse>& responses,
                            Criterion criterion);

struct TypeSummary {
    VoiceType voice_type = VoiceType::natural;
    int responses = 0;
    double hit_pct = 0.0;
    double miss_pct = 0.0;
    double undetermined_pct = 0.0;  // 0 for transcription
};

/// Pooled percentages per voice type (responses, not audios, as the unit).
std::vector<TypeSummary> summarize_by_type(const std::vector<TallyRow>& rows,
                                           Criterion criterion);

std::vector<EvalItem> read_items_csv(const std::filesystem::path& path);
std::vector<ListeningResponse> read_responses_csv(const std::filesystem::path& path);

/// Write tallies_<criterion>.csv, summary_<criterion>.csv and
/// plot_<criterion>.txt (category, percentage pairs) into out_dir.
void export_report(const std::filesystem::path& out_dir, Criterion criterion,
                   const std::vector<TallyRow>& rows,
                   const std::vector<TypeSummary>& summaries);

}  // namespace voz
