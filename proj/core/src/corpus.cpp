#include "voz/corpus.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "voz/error.hpp"
#include "voz/textproc.hpp"

namespace voz {

std::string to_string(AgeGroup g) { return g == AgeGroup::child ? "child" : "adult"; }
std::string to_string(Gender g) { return g == Gender::masculine ? "masculine" : "feminine"; }

AgeGroup parse_age_group(const std::string& token) {
    if (token == "child") return AgeGroup::child;
    if (token == "adult") return AgeGroup::adult;
    throw Error("invalid age group '" + token + "' (expected child|adult)");
}

Gender parse_gender(const std::string& token) {
    if (token == "masculine") return Gender::masculine;
    if (token == "feminine") return Gender::feminine;
    throw Error("invalid gender '" + token + "' (expected masculine|feminine)");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Corpus load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path.string());

    Corpus corpus;
    corpus.root = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    std::set<std::string> seen_ids;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;

        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, '\t')) fields.push_back(trim(field));

        const auto where = path.filename().string() + ":" + std::to_string(lineno);
        if (fields.size() != 6)
            throw Error("manifest record at " + where + " has " +
                        std::to_string(fields.size()) + " fields, expected 6");

        Utterance utt;
        utt.id = fields[0];
        utt.audio_path = fields[1];
        utt.text = fields[2];
        utt.speaker_id = fields[3];
        utt.age_group = parse_age_group(fields[4]);
        utt.gender = parse_gender(fields[5]);

        if (utt.id.empty() || utt.audio_path.empty() || utt.text.empty() ||
            utt.speaker_id.empty())
            throw Error("manifest record at " + where + " has an empty field");
        if (!seen_ids.insert(utt.id).second)
            throw Error("duplicate utterance id '" + utt.id + "' at " + where);

        corpus.utterances.push_back(std::move(utt));
    }
    return corpus;
}

AudioBuffer load_utterance_audio(const Corpus& corpus, const Utterance& utt) {
    std::filesystem::path p(utt.audio_path);
    if (p.is_relative()) p = corpus.root / p;
    return read_wav(p);
}

ValidationReport validate_corpus(const Corpus& corpus) {
    ValidationReport report;
    report.rows.reserve(corpus.utterances.size());
    for (const Utterance& utt : corpus.utterances) {
        UtteranceReport row;
        row.id = utt.id;
        row.bad_chars = normalizer_alphabet_violations(utt.text);
        try {
            const AudioBuffer audio = load_utterance_audio(corpus, utt);
            if (audio.sample_rate != kCanonicalSampleRate)
                throw Error("sample rate " + std::to_string(audio.sample_rate) +
                            " Hz, expected " + std::to_string(kCanonicalSampleRate));
            row.audio_ok = true;
            row.sample_rate = audio.sample_rate;
            row.duration_s = audio.duration_s();
            size_t clipped = 0;
            for (double s : audio.samples)
                if (std::abs(s) >= kClipLevel) ++clipped;
            row.clipping_ratio =
                audio.samples.empty() ? 0.0 : double(clipped) / double(audio.samples.size());
            row.clipping_flag = row.clipping_ratio > kClipRatioLimit;
            row.short_flag = row.duration_s < kMinUtteranceSeconds;
        } catch (const Error& e) {
            row.audio_ok = false;
            row.audio_error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

bool ValidationReport::any_fatal() const {
    for (const auto& r : rows)
        if (r.fatal()) return true;
    return false;
}

void ValidationReport::write_text(std::ostream& out) const {
    size_t fatal = 0, warned = 0;
    for (const auto& r : rows) {
        out << r.id << ": ";
        if (!r.audio_ok) {
            out << "AUDIO ERROR (" << r.audio_error << ")";
        } else {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%.3f s, clipping %.4f", r.duration_s,
                          r.clipping_ratio);
            out << buf;
            if (r.clipping_flag) out << " [clipped]";
            if (r.short_flag) out << " [short]";
        }
        if (!r.bad_chars.empty()) out << " [bad chars: " << r.bad_chars << "]";
        out << '\n';
        if (r.fatal())
            ++fatal;
        else if (r.clipping_flag || r.short_flag)
            ++warned;
    }
    out << rows.size() << " utterances, " << fatal << " fatal, " << warned << " warnings\n";
}

void ValidationReport::write_csv(std::ostream& out) const {
    out << "id,audio_ok,sample_rate,duration_s,clipping_ratio,clipping_flag,short_flag,"
           "bad_chars,audio_error\n";
    for (const auto& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.duration_s, r.clipping_ratio);
        out << r.id << ',' << (r.audio_ok ? 1 : 0) << ',' << r.sample_rate << ',' << buf << ','
            << (r.clipping_flag ? 1 : 0) << ',' << (r.short_flag ? 1 : 0) << ',' << r.bad_chars
            << ',' << r.audio_error << '\n';
    }
}

}  // namespace voz
