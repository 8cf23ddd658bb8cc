#include <doctest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "voz/corpus.hpp"
#include "voz/error.hpp"

using namespace voz;
using test_support::ScratchDir;

TEST_SUITE_BEGIN("corpus");

namespace {

std::string write_lines(const ScratchDir& dir, const std::string& name,
                        const std::string& body) {
    const std::string path = dir.file(name);
    std::ofstream(path, std::ios::trunc) << body;
    return path;
}

}  // namespace

TEST_CASE("manifest parsing keeps order and all six fields") {
    ScratchDir dir("corpus_parse");
    const std::string manifest = write_lines(
        dir, "m.tsv",
        "# comment line\n"
        "u01 \t wav/u01.wav \t pala \t spk1 \t child \t feminine\n"
        "\n"
        "u02\twav/u02.wav\ttortuga grande\tspk2\tadult\tmasculine\n");
    const Corpus corpus = load_manifest(manifest);
    REQUIRE(corpus.utterances.size() == 2);
    const Utterance& u = corpus.utterances[0];
    CHECK(u.id == "u01");
    CHECK(u.audio_path == "wav/u01.wav");
    CHECK(u.text == "pala");
    CHECK(u.speaker_id == "spk1");
    CHECK(u.age_group == AgeGroup::child);
    CHECK(u.gender == Gender::feminine);
    CHECK(corpus.utterances[1].id == "u02");
    CHECK(corpus.utterances[1].age_group == AgeGroup::adult);
    CHECK(corpus.root == dir.path());
}

TEST_CASE("empty manifest loads as an empty corpus") {
    ScratchDir dir("corpus_empty");
    const Corpus corpus = load_manifest(write_lines(dir, "m.tsv", "# nothing here\n"));
    CHECK(corpus.utterances.empty());
}

TEST_CASE("duplicate ids and missing fields are errors") {
    ScratchDir dir("corpus_dup");
    const std::string dup = write_lines(dir, "dup.tsv",
                                        "a\tx.wav\tpala\ts\tchild\tfeminine\n"
                                        "a\ty.wav\tpala\ts\tchild\tfeminine\n");
    CHECK_THROWS_WITH_AS(load_manifest(dup), doctest::Contains("'a'"), Error);

    const std::string missing =
        write_lines(dir, "mis.tsv", "b\tx.wav\tpala\ts\tchild\n");
    CHECK_THROWS_WITH_AS(load_manifest(missing), doctest::Contains("5 fields"), Error);

    const std::string empty_text =
        write_lines(dir, "emp.tsv", "c\tx.wav\t  \ts\tchild\tfeminine\n");
    CHECK_THROWS_AS(load_manifest(empty_text), Error);

    CHECK_THROWS_AS(load_manifest(dir.file("missing.tsv")), Error);
}

TEST_CASE("validation flags each documented condition") {
    ScratchDir dir("corpus_validate");
    std::filesystem::create_directories(dir.path() / "wav");

    write_wav(test_support::silence(1.0), dir.path() / "wav" / "clean.wav");

    AudioBuffer square{std::vector<double>(16000), 16000};
    for (size_t i = 0; i < square.samples.size(); ++i)
        square.samples[i] = (i / 80) % 2 ? 1.0 : -1.0;
    write_wav(square, dir.path() / "wav" / "square.wav");

    write_wav(test_support::silence(0.05), dir.path() / "wav" / "short.wav");
    write_wav(test_support::silence(0.5, 8000), dir.path() / "wav" / "slow.wav");

    const std::string manifest = write_lines(
        dir, "m.tsv",
        "clean\twav/clean.wav\tpala\ts\tchild\tfeminine\n"
        "square\twav/square.wav\tpala\ts\tchild\tfeminine\n"
        "short\twav/short.wav\tpala\ts\tchild\tfeminine\n"
        "missing\twav/nope.wav\tpala\ts\tchild\tfeminine\n"
        "badrate\twav/slow.wav\tpala\ts\tchild\tfeminine\n"
        "badchar\twav/clean.wav\tk@t\ts\tchild\tfeminine\n");

    const ValidationReport report = validate_corpus(load_manifest(manifest));
    REQUIRE(report.rows.size() == 6);

    const UtteranceReport& clean = report.rows[0];
    CHECK(clean.audio_ok);
    CHECK(clean.clipping_ratio == 0.0);
    CHECK(!clean.short_flag);
    CHECK(!clean.fatal());

    const UtteranceReport& square_row = report.rows[1];
    CHECK(square_row.clipping_ratio == doctest::Approx(1.0));
    CHECK(square_row.clipping_flag);

    CHECK(report.rows[2].short_flag);

    CHECK(!report.rows[3].audio_ok);
    CHECK(report.rows[3].fatal());

    CHECK(!report.rows[4].audio_ok);  // wrong sample rate is rejected

    CHECK(report.rows[5].bad_chars == "@");
    CHECK(report.rows[5].fatal());

    CHECK(report.any_fatal());

    std::ostringstream text, csv;
    report.write_text(text);
    report.write_csv(csv);
    CHECK(text.str().find("wav/nope.wav") != std::string::npos);
    CHECK(csv.str().find("badchar") != std::string::npos);
    CHECK(csv.str().substr(0, 3) == "id,");
}

TEST_CASE("validation does not mutate the corpus") {
    ScratchDir dir("corpus_const");
    std::filesystem::create_directories(dir.path() / "wav");
    write_wav(test_support::silence(0.5), dir.path() / "wav" / "a.wav");
    const std::string manifest =
        write_lines(dir, "m.tsv", "a\twav/a.wav\tpala\ts\tchild\tfeminine\n");
    const Corpus corpus = load_manifest(manifest);
    const std::string before = corpus.utterances[0].text;
    (void)validate_corpus(corpus);
    CHECK(corpus.utterances[0].text == before);
    CHECK(corpus.utterances.size() == 1);
}

TEST_SUITE_END();
