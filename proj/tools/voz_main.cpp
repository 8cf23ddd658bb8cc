// Command-line front end: corpus validation, HMM training, synthesis,
// copy-synthesis and listening-test reports.
//
// Exit codes: 0 success, 1 user/data error, 2 internal error.
// Human-readable output goes to stderr; file outputs go where flags say.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "voz/audio.hpp"
#include "voz/corpus.hpp"
#include "voz/error.hpp"
#include "voz/eval.hpp"
#include "voz/features.hpp"
#include "voz/generate.hpp"
#include "voz/hmm.hpp"
#include "voz/model_io.hpp"
#include "voz/textproc.hpp"
#include "voz/train.hpp"
#include "voz/vocoder.hpp"

namespace {

struct Defaults {
    int states = 5;
    int iters = 20;
    double rate = 1.0;
    uint64_t seed = 0;
};

std::vector<std::string> inventory_symbols() {
    std::vector<std::string> symbols;
    for (const voz::Phoneme& p : voz::phoneme_inventory()) symbols.push_back(p.symbol);
    return symbols;
}

voz::PhoneticSpec phonetize(const std::string& text) {
    return voz::g2p(voz::normalize_text(text));
}

// manifest -> analyzed training utterances (delta features attached)
std::vector<voz::TrainingUtterance> load_training_corpus(const std::string& manifest) {
    const voz::Corpus corpus = voz::load_manifest(manifest);
    if (corpus.utterances.empty()) throw voz::Error("empty corpus: " + manifest);

    const voz::AnalysisConfig cfg;
    std::vector<voz::TrainingUtterance> out;
    for (const voz::Utterance& utt : corpus.utterances) {
        const voz::AudioBuffer audio = voz::load_utterance_audio(corpus, utt);
        if (audio.sample_rate != voz::kCanonicalSampleRate)
            throw voz::Error("utterance '" + utt.id + "': sample rate " +
                             std::to_string(audio.sample_rate) + " Hz, expected " +
                             std::to_string(voz::kCanonicalSampleRate));
        voz::TrainingUtterance tu;
        tu.id = utt.id;
        tu.spec = phonetize(utt.text);
        tu.features = voz::compute_deltas(voz::analyze(audio, cfg));
        out.push_back(std::move(tu));
    }
    return out;
}

void maybe_dump_features(const std::string& path, const voz::FeatureSequence& seq) {
    if (path.empty()) return;
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".txt") == 0) {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw voz::Error("cannot open for writing: " + path);
        voz::dump_features_text(seq, out);
    } else {
        voz::write_features(seq, path);
    }
}

int cmd_corpus_validate(const std::string& manifest, const std::string& out_prefix) {
    const voz::Corpus corpus = voz::load_manifest(manifest);
    if (corpus.utterances.empty()) throw voz::Error("empty corpus: " + manifest);

    const voz::ValidationReport report = voz::validate_corpus(corpus);
    {
        std::ofstream txt(out_prefix + ".txt", std::ios::trunc);
        if (!txt) throw voz::Error("cannot open for writing: " + out_prefix + ".txt");
        report.write_text(txt);
        std::ofstream csv(out_prefix + ".csv", std::ios::trunc);
        report.write_csv(csv);
    }
    report.write_text(std::cerr);
    return report.any_fatal() ? 1 : 0;
}

int cmd_train(const std::string& manifest, const std::string& out_model, int states, int iters,
              const std::string& loglik_path, const std::string& align_path) {
    const auto corpus = load_training_corpus(manifest);

    voz::ModelSet models = voz::flat_start(corpus, inventory_symbols(), states);
    voz::TrainResult trained = voz::embedded_train(std::move(models), corpus, iters);
    for (const std::string& id : trained.skipped)
        std::cerr << "skipped (too short for its chain): " << id << "\n";

    voz::DurationEstimate durations =
        voz::estimate_durations(std::move(trained.models), corpus);
    for (const std::string& symbol : durations.unaligned)
        std::cerr << "phoneme never aligned, keeping flat durations: " << symbol << "\n";

    voz::save_model_set(durations.models, out_model);

    const std::string loglik_file = loglik_path.empty() ? out_model + ".loglik.csv" : loglik_path;
    {
        std::ofstream out(loglik_file, std::ios::trunc);
        if (!out) throw voz::Error("cannot open for writing: " + loglik_file);
        out << "iteration,log_likelihood\n";
        char buf[40];
        for (size_t i = 0; i < trained.loglik_trace.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", trained.loglik_trace[i]);
            out << (i + 1) << ',' << buf << '\n';
        }
    }

    if (!align_path.empty()) {
        std::ofstream out(align_path, std::ios::trunc);
        if (!out) throw voz::Error("cannot open for writing: " + align_path);
        for (const voz::AlignmentRow& row : durations.alignments)
            out << row.utterance_id << '\t' << row.phoneme << '\t' << row.state << '\t'
                << row.begin_frame << '\t' << row.end_frame << '\n';
    }

    std::cerr << "trained " << durations.models.models.size() << " phoneme models over "
              << iters << " iterations; model written to " << out_model << "\n";
    return 0;
}

int cmd_synth(const std::string& model_path, const std::string& out_wav, const std::string& text,
              double rate, uint64_t seed, const std::string& dump_path,
              const std::string& debug_dump) {
    if (!(rate > 0.0)) throw voz::Error("--rate must be positive");
    const voz::ModelSet models = voz::load_model_set(model_path);
    const voz::AnalysisConfig& cfg = models.meta.analysis;

    const voz::PhoneticSpec spec = phonetize(text);
    // CLI rate is a speaking-speed multiplier (2.0 = twice as fast), so the
    // duration model scales by its inverse.
    const voz::StateTrajectoryPlan plan = voz::predict_durations(spec, models, 1.0 / rate);
    const auto mcep = voz::mlpg(plan, models);
    const auto f0 = voz::generate_f0(plan, models);

    voz::ExcitationStats exc_stats;
    const auto excitation = voz::build_excitation(f0, cfg.frame_shift_s, cfg.sample_rate, seed,
                                                  cfg.f0_min, cfg.f0_max, &exc_stats);
    voz::SynthesisStats stats;
    const voz::AudioBuffer audio = voz::synthesize(mcep, excitation, cfg.alpha, cfg.sample_rate,
                                                   cfg.frame_shift_s, &stats);
    voz::write_wav(audio, out_wav);

    if (!dump_path.empty()) {
        voz::FeatureSequence seq;
        seq.frame_shift_s = cfg.frame_shift_s;
        seq.sample_rate = cfg.sample_rate;
        seq.order = cfg.order;
        seq.frames.resize(mcep.size());
        for (size_t t = 0; t < mcep.size(); ++t) {
            seq.frames[t].mcep = mcep[t];
            if (f0[t].voiced) seq.frames[t] = {mcep[t], true, {std::log(f0[t].f0_hz), 0, 0}};
        }
        maybe_dump_features(dump_path, voz::compute_deltas(seq));
    }
    if (!debug_dump.empty()) {
        std::ofstream out(debug_dump, std::ios::trunc);
        if (!out) throw voz::Error("cannot open for writing: " + debug_dump);
        out << "frame,f0_hz,log_gain\n";
        char buf[64];
        for (size_t t = 0; t < mcep.size(); ++t) {
            std::snprintf(buf, sizeof buf, "%zu,%.6g,%.6g", t, f0[t].voiced ? f0[t].f0_hz : 0.0,
                          mcep[t][0]);
            out << buf << '\n';
        }
    }

    std::cerr << "phones: " << spec.to_line() << "\n";
    std::cerr << "frames: " << plan.total_frames() << " ("
              << double(plan.total_frames()) * cfg.frame_shift_s << " s), raw peak "
              << stats.raw_peak;
    if (exc_stats.clamped_frames) std::cerr << ", " << exc_stats.clamped_frames << " F0 clamps";
    std::cerr << "\n";
    return 0;
}

int cmd_copysynth(const std::string& in_wav, const std::string& out_wav, uint64_t seed,
                  const std::string& dump_path) {
    const voz::AudioBuffer audio = voz::read_wav(in_wav);
    voz::AnalysisConfig cfg;
    if (audio.sample_rate != cfg.sample_rate)
        throw voz::Error("copysynth expects " + std::to_string(cfg.sample_rate) + " Hz input, got " +
                         std::to_string(audio.sample_rate) + " Hz");
    if (!dump_path.empty()) maybe_dump_features(dump_path, voz::analyze(audio, cfg));

    voz::SynthesisStats stats;
    const voz::AudioBuffer out = voz::copy_synthesis(audio, cfg, seed, &stats);
    voz::write_wav(out, out_wav);
    std::cerr << "copy-synthesized " << out.duration_s() << " s, raw peak " << stats.raw_peak
              << "\n";
    return 0;
}

int cmd_eval_report(const std::string& items_csv, const std::string& responses_csv,
                    const std::string& out_dir) {
    const auto items = voz::read_items_csv(items_csv);
    const auto responses = voz::read_responses_csv(responses_csv);
    if (responses.empty()) throw voz::Error("no responses in " + responses_csv);

    bool any = false;
    for (voz::Criterion criterion :
         {voz::Criterion::age, voz::Criterion::gender, voz::Criterion::transcription}) {
        const bool present = std::any_of(responses.begin(), responses.end(),
                                         [&](const auto& r) { return r.criterion == criterion; });
        if (!present) continue;
        any = true;
        const auto rows = voz::tally(items, responses, criterion);
        const auto summaries = voz::summarize_by_type(rows, criterion);
        voz::export_report(out_dir, criterion, rows, summaries);
        for (const voz::TypeSummary& s : summaries) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s %s: %d responses, %.1f%% hit, %.1f%% miss",
                          voz::to_string(criterion).c_str(), voz::to_string(s.voice_type).c_str(),
                          s.responses, s.hit_pct, s.miss_pct);
            std::cerr << buf;
            if (criterion != voz::Criterion::transcription) {
                std::snprintf(buf, sizeof buf, ", %.1f%% undetermined", s.undetermined_pct);
                std::cerr << buf;
            }
            std::cerr << "\n";
        }
    }
    if (!any) throw voz::Error("no responses in " + responses_csv);
    std::cerr << "reports written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HMM-based Spanish speech synthesis toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read defaults from an INI file (flags take precedence)");

    Defaults defaults;

    // corpus-validate
    std::string manifest, out_prefix = "validation_report";
    CLI::App* validate = app.add_subcommand("corpus-validate", "Check a corpus manifest");
    validate->add_option("manifest", manifest, "TSV manifest")->required();
    validate->add_option("--out", out_prefix, "Report path prefix (.txt and .csv are written)");

    // train
    std::string train_manifest, out_model, loglik_path, align_path;
    int states = defaults.states;
    int iters = defaults.iters;
    uint64_t train_seed = defaults.seed;
    CLI::App* train = app.add_subcommand("train", "Train phoneme HMMs from a corpus");
    train->add_option("manifest", train_manifest, "TSV manifest")->required();
    train->add_option("out_model", out_model, "Output model file")->required();
    train->add_option("--states", states, "Emitting states per phoneme")
        ->capture_default_str()
        ->check(CLI::Range(1, 64));
    train->add_option("--iters", iters, "Re-estimation iterations")
        ->capture_default_str()
        ->check(CLI::Range(0, 100000));
    train->add_option("--seed", train_seed,
                      "Accepted for interface uniformity; training is deterministic")
        ->capture_default_str();
    train->add_option("--loglik", loglik_path, "Log-likelihood trace CSV (default <model>.loglik.csv)");
    train->add_option("--align", align_path, "Alignment dump TSV");

    // synth
    std::string model_path, synth_out, text, dump_path, debug_dump;
    double rate = defaults.rate;
    uint64_t synth_seed = defaults.seed;
    CLI::App* synth = app.add_subcommand("synth", "Synthesize speech from text");
    synth->add_option("model", model_path, "Trained model file")->required();
    synth->add_option("out_wav", synth_out, "Output WAV")->required();
    synth->add_option("--text", text, "Text to synthesize")->required();
    synth->add_option("--rate", rate, "Speaking-speed multiplier (2.0 = twice as fast)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_seed, "Noise generator seed")->capture_default_str();
    synth->add_option("--dump-features", dump_path,
                      "Dump the generated trajectory (.txt for text, else binary)");
    synth->add_option("--debug-dump", debug_dump, "Per-frame F0/gain CSV");

    // copysynth
    std::string copy_in, copy_out, copy_dump;
    uint64_t copy_seed = defaults.seed;
    CLI::App* copysynth = app.add_subcommand("copysynth", "Analyze a WAV and vocode it back");
    copysynth->add_option("in_wav", copy_in, "Input WAV (16 kHz mono PCM16)")->required();
    copysynth->add_option("out_wav", copy_out, "Output WAV")->required();
    copysynth->add_option("--seed", copy_seed, "Noise generator seed")->capture_default_str();
    copysynth->add_option("--dump-features", copy_dump,
                          "Dump analyzed features (.txt for text, else binary)");

    // eval-report
    std::string items_csv, responses_csv, report_dir;
    CLI::App* eval = app.add_subcommand("eval-report", "Tally listening-test responses");
    eval->add_option("items_csv", items_csv, "Items CSV")->required();
    eval->add_option("responses_csv", responses_csv, "Responses CSV")->required();
    eval->add_option("out_dir", report_dir, "Report output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (validate->parsed()) return cmd_corpus_validate(manifest, out_prefix);
        if (train->parsed())
            return cmd_train(train_manifest, out_model, states, iters, loglik_path, align_path);
        if (synth->parsed())
            return cmd_synth(model_path, synth_out, text, rate, synth_seed, dump_path, debug_dump);
        if (copysynth->parsed()) return cmd_copysynth(copy_in, copy_out, copy_seed, copy_dump);
        if (eval->parsed()) return cmd_eval_report(items_csv, responses_csv, report_dir);
    } catch (const voz::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;  // unreachable
}
