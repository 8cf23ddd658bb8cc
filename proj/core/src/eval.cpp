#include "voz/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "voz/error.hpp"

namespace voz {

std::string to_string(VoiceType v) { return v == VoiceType::artificial ? "artificial" : "natural"; }

std::string to_string(Criterion c) {
    switch (c) {
        case Criterion::age: return "age";
        case Criterion::gender: return "gender";
        default: return "transcription";
    }
}

VoiceType parse_voice_type(const std::string& token) {
    if (token == "artificial") return VoiceType::artificial;
    if (token == "natural") return VoiceType::natural;
    throw Error("invalid voice type '" + token + "' (expected artificial|natural)");
}

Criterion parse_criterion(const std::string& token) {
    if (token == "age") return Criterion::age;
    if (token == "gender") return Criterion::gender;
    if (token == "transcription") return Criterion::transcription;
    throw Error("invalid criterion '" + token + "' (expected age|gender|transcription)");
}

namespace {

// lowercase, fold accents, drop everything that is not a letter or digit,
// collapse runs of separators into single spaces
std::string fold_word(const std::string& s) {
    std::string out;
    bool pending_space = false;
    size_t i = 0;
    while (i < s.size()) {
        const unsigned char b0 = (unsigned char)s[i];
        uint32_t cp = b0;
        size_t len = 1;
        if (b0 >= 0xF0) len = 4;
        else if (b0 >= 0xE0) len = 3;
        else if (b0 >= 0xC0) len = 2;
        if (len > 1 && i + len <= s.size()) {
            cp = b0 & (0x7Fu >> len);
            for (size_t k = 1; k < len; ++k) cp = (cp << 6) | ((unsigned char)s[i + k] & 0x3F);
        }
        i += len;

        if (cp >= 'A' && cp <= 'Z') cp += 32;
        switch (cp) {
            case 0xC1: case 0xE1: cp = 'a'; break;
            case 0xC9: case 0xE9: cp = 'e'; break;
            case 0xCD: case 0xED: cp = 'i'; break;
            case 0xD3: case 0xF3: cp = 'o'; break;
            case 0xDA: case 0xFA: case 0xDC: case 0xFC: cp = 'u'; break;
            case 0xD1: cp = 0xF1; break;  // enye kept as a letter
            default: break;
        }
        const bool keep = (cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9') || cp == 0xF1;
        if (keep) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            if (cp == 0xF1) {
                out += char(0xC3);
                out += char(0xB1);
            } else {
                out += char(cp);
            }
        } else {
            pending_space = true;
        }
    }
    return out;
}

}  // namespace

bool score_transcription(const std::string& truth_word, const std::string& answer) {
    const std::string folded_answer = fold_word(answer);
    if (folded_answer.empty()) return false;  // unanswered counts as an error
    return folded_answer == fold_word(truth_word);
}

std::vector<TallyRow> tally(const std::vector<EvalItem>& items,
                            const std::vector<ListeningResponse>& responses,
                            Criterion criterion) {
    std::map<std::string, const EvalItem*> by_id;
    for (const EvalItem& item : items) {
        if (!by_id.emplace(item.audio_id, &item).second)
            throw Error("duplicate audio id '" + item.audio_id + "' in items");
    }

    std::map<std::string, TallyRow> counts;
    for (const ListeningResponse& resp : responses) {
        if (resp.criterion != criterion) continue;
        const auto it = by_id.find(resp.audio_id);
        if (it == by_id.end()) throw Error("unknown audio id '" + resp.audio_id + "'");
        const EvalItem& item = *it->second;

        bool hit = false, undet = false;
        switch (criterion) {
            case Criterion::age:
                if (!item.truth_age)
                    throw Error("item '" + item.audio_id + "' has no age truth");
                if (resp.answer == "undetermined") undet = true;
                else hit = parse_age_group(resp.answer) == *item.truth_age;
                break;
            case Criterion::gender:
                if (!item.truth_gender)
                    throw Error("item '" + item.audio_id + "' has no gender truth");
                if (resp.answer == "undetermined") undet = true;
                else hit = parse_gender(resp.answer) == *item.truth_gender;
                break;
            case Criterion::transcription:
                if (item.truth_word.empty())
                    throw Error("item '" + item.audio_id + "' has no transcription truth");
                hit = score_transcription(item.truth_word, resp.answer);
                break;
        }
        TallyRow& row = counts[resp.audio_id];
        if (hit) ++row.hits;
        else if (undet) ++row.undetermined;
        else ++row.misses;
    }

    std::vector<TallyRow> rows;
    for (const EvalItem& item : items) {
        const bool has_truth = criterion == Criterion::age ? item.truth_age.has_value()
                             : criterion == Criterion::gender ? item.truth_gender.has_value()
                                                              : !item.truth_word.empty();
        if (!has_truth) continue;
        TallyRow row = counts.count(item.audio_id) ? counts[item.audio_id] : TallyRow{};
        row.audio_id = item.audio_id;
        row.voice_type = item.voice_type;
        rows.push_back(row);
    }
    return rows;
}

std::vector<TypeSummary> summarize_by_type(const std::vector<TallyRow>& rows,
                                           Criterion criterion) {
    if (rows.empty()) throw Error("summarize_by_type: no tally rows");

    std::vector<TypeSummary> out;
    for (VoiceType type : {VoiceType::artificial, VoiceType::natural}) {
        long hits = 0, misses = 0, undet = 0;
        for (const TallyRow& r : rows) {
            if (r.voice_type != type) continue;
            hits += r.hits;
            misses += r.misses;
            undet += r.undetermined;
        }
        const long total = hits + misses + undet;
        if (total == 0) continue;
        TypeSummary s;
        s.voice_type = type;
        s.responses = int(total);
        s.hit_pct = 100.0 * double(hits) / double(total);
        s.miss_pct = 100.0 * double(misses) / double(total);
        s.undetermined_pct =
            criterion == Criterion::transcription ? 0.0 : 100.0 * double(undet) / double(total);
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV input / report output
// ---------------------------------------------------------------------------

namespace {

// split on commas into at most `max_fields` parts; the last part keeps any
// remaining commas (transcription answers may contain them)
std::vector<std::string> split_csv(const std::string& line, size_t max_fields) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (fields.size() + 1 < max_fields) {
        const size_t pos = line.find(',', start);
        if (pos == std::string::npos) break;
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    fields.push_back(line.substr(start));
    return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

std::vector<EvalItem> read_items_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || split_csv(lines[0], 5)[0] != "audio_id")
        throw Error("items file must start with the header "
                    "audio_id,voice_type,truth_age,truth_gender,truth_word: " +
                    path.string());
    std::vector<EvalItem> items;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_csv(lines[i], 5);
        if (f.size() != 5)
            throw Error("bad items record at " + path.filename().string() + ":" +
                        std::to_string(i + 1));
        EvalItem item;
        item.audio_id = f[0];
        item.voice_type = parse_voice_type(f[1]);
        if (!f[2].empty()) item.truth_age = parse_age_group(f[2]);
        if (!f[3].empty()) item.truth_gender = parse_gender(f[3]);
        item.truth_word = f[4];
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<ListeningResponse> read_responses_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || split_csv(lines[0], 4)[0] != "rater_id")
        throw Error("responses file must start with the header "
                    "rater_id,audio_id,criterion,answer: " +
                    path.string());
    std::vector<ListeningResponse> responses;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_csv(lines[i], 4);
        if (f.size() != 4)
            throw Error("bad response record at " + path.filename().string() + ":" +
                        std::to_string(i + 1));
        responses.push_back({f[0], f[1], parse_criterion(f[2]), f[3]});
    }
    return responses;
}

void export_report(const std::filesystem::path& out_dir, Criterion criterion,
                   const std::vector<TallyRow>& rows,
                   const std::vector<TypeSummary>& summaries) {
    std::filesystem::create_directories(out_dir);
    const std::string name = to_string(criterion);
    const bool with_undet = criterion != Criterion::transcription;

    {
        std::ofstream out(out_dir / ("tallies_" + name + ".csv"), std::ios::trunc);
        if (!out) throw Error("cannot write report into " + out_dir.string());
        out << (with_undet ? "audio_id,voice_type,hits,misses,undetermined\n"
                           : "audio_id,voice_type,hits,misses\n");
        for (const TallyRow& r : rows) {
            out << r.audio_id << ',' << to_string(r.voice_type) << ',' << r.hits << ','
                << r.misses;
            if (with_undet) out << ',' << r.undetermined;
            out << '\n';
        }
    }
    {
        std::ofstream out(out_dir / ("summary_" + name + ".csv"), std::ios::trunc);
        out << (with_undet ? "voice_type,responses,hit_pct,miss_pct,undetermined_pct\n"
                           : "voice_type,responses,hit_pct,miss_pct\n");
        char buf[96];
        for (const TypeSummary& s : summaries) {
            if (with_undet)
                std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f", s.hit_pct, s.miss_pct,
                              s.undetermined_pct);
            else
                std::snprintf(buf, sizeof buf, "%.4f,%.4f", s.hit_pct, s.miss_pct);
            out << to_string(s.voice_type) << ',' << s.responses << ',' << buf << '\n';
        }
    }
    {
        std::ofstream out(out_dir / ("plot_" + name + ".txt"), std::ios::trunc);
        char buf[32];
        for (const TypeSummary& s : summaries) {
            const std::string prefix = to_string(s.voice_type);
            std::snprintf(buf, sizeof buf, "%.4f", s.hit_pct);
            out << prefix << "_hit " << buf << '\n';
            std::snprintf(buf, sizeof buf, "%.4f", s.miss_pct);
            out << prefix << "_miss " << buf << '\n';
            if (with_undet) {
                std::snprintf(buf, sizeof buf, "%.4f", s.undetermined_pct);
                out << prefix << "_undetermined " << buf << '\n';
            }
        }
    }
}

}  // namespace voz
