// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reference_tallies.hpp"
#include "support.hpp"
#include "voz/audio.hpp"
#include "voz/eval.hpp"
#include "voz/features.hpp"
#include "voz/generate.hpp"
#include "voz/hmm.hpp"
#include "voz/model_io.hpp"
#include "voz/textproc.hpp"
#include "voz/vocoder.hpp"

namespace {

int g_failures = 0;

class Criterion {
public:
    Criterion(int id, std::string name) : id_(id), name_(std::move(name)) {}

    void require(bool ok, const std::string& detail) {
        if (!ok && first_failure_.empty()) first_failure_ = detail;
        ok_ = ok_ && ok;
    }

    ~Criterion() {
        std::printf("[%s] criterion %d: %s%s%s\n", ok_ ? "PASS" : "FAIL", id_, name_.c_str(),
                    first_failure_.empty() ? "" : " -- ", first_failure_.c_str());
        std::fflush(stdout);
        if (!ok_) ++g_failures;
    }

private:
    int id_;
    std::string name_;
    bool ok_ = true;
    std::string first_failure_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

const std::string kFixtures = VOZ_FIXTURE_DIR;

// ---------------------------------------------------------------------------

void criterion_1_eval_fixtures() {
    Criterion c(1, "eval-report reproduces the reference listening-test tables");
    const auto start = std::chrono::steady_clock::now();

    test_support::ScratchDir dir("acc_eval");
    int rc = test_support::run_cli("eval-report '" + kFixtures + "/age_gender_items.csv' '" +
                                   kFixtures + "/age_gender_responses.csv' '" +
                                   dir.file("rep") + "'");
    c.require(rc == 0, "eval-report (age/gender) exited " + std::to_string(rc));
    rc = test_support::run_cli("eval-report '" + kFixtures + "/transcription_items.csv' '" +
                               kFixtures + "/transcription_responses.csv' '" +
                               dir.file("rep") + "'");
    c.require(rc == 0, "eval-report (transcription) exited " + std::to_string(rc));

    // every published row, exactly
    const auto items = voz::read_items_csv(kFixtures + "/age_gender_items.csv");
    const auto responses = voz::read_responses_csv(kFixtures + "/age_gender_responses.csv");
    const auto age = voz::tally(items, responses, voz::Criterion::age);
    const auto gender = voz::tally(items, responses, voz::Criterion::gender);
    c.require(age.size() == 20 && gender.size() == 20, "expected 20 tally rows");
    for (int i = 0; i < 20; ++i) {
        const auto& ea = reference_tallies::kAge[i];
        const auto& ra = age[size_t(i)];
        c.require(ra.hits == ea.hits && ra.misses == ea.misses &&
                      ra.undetermined == ea.undetermined &&
                      voz::to_string(ra.voice_type) == ea.voice,
                  std::string("age row mismatch at ") + ea.audio_id);
        const auto& eg = reference_tallies::kGender[i];
        const auto& rg = gender[size_t(i)];
        c.require(rg.hits == eg.hits && rg.misses == eg.misses &&
                      rg.undetermined == eg.undetermined,
                  std::string("gender row mismatch at ") + eg.audio_id);
    }
    const auto words = voz::read_items_csv(kFixtures + "/transcription_items.csv");
    const auto word_resp = voz::read_responses_csv(kFixtures + "/transcription_responses.csv");
    const auto tr = voz::tally(words, word_resp, voz::Criterion::transcription);
    c.require(tr.size() == 20, "expected 20 transcription rows");
    for (int i = 0; i < 20; ++i) {
        const auto& ew = reference_tallies::kTranscription[i];
        c.require(tr[size_t(i)].hits == ew.hits && tr[size_t(i)].misses == ew.misses,
                  std::string("transcription row mismatch at ") + ew.audio_id);
    }

    // aggregates
    const auto age_sum = voz::summarize_by_type(age, voz::Criterion::age);
    c.require(age_sum[0].responses == 203 &&
                  std::abs(age_sum[0].hit_pct - 100.0 * 89.0 / 203.0) < 1e-9,
              "age artificial aggregate != 89/203");
    c.require(age_sum[1].responses == 377 &&
                  std::abs(age_sum[1].hit_pct - 100.0 * 335.0 / 377.0) < 1e-9,
              "age natural aggregate != 335/377");
    const auto gen_sum = voz::summarize_by_type(gender, voz::Criterion::gender);
    c.require(std::abs(gen_sum[0].hit_pct - 100.0 * 33.0 / 203.0) < 1e-9,
              "gender artificial aggregate != 33/203");
    c.require(std::abs(gen_sum[1].hit_pct - 100.0 * 306.0 / 377.0) < 1e-9,
              "gender natural aggregate != 306/377");
    const auto tr_sum = voz::summarize_by_type(tr, voz::Criterion::transcription);
    c.require(tr_sum[0].responses == 220 &&
                  std::abs(tr_sum[0].hit_pct - 100.0 * 156.0 / 220.0) < 1e-9,
              "intelligibility artificial aggregate != 156/220");
    c.require(tr_sum[1].responses == 180 &&
                  std::abs(tr_sum[1].hit_pct - 100.0 * 175.0 / 180.0) < 1e-9,
              "intelligibility natural aggregate != 175/180");
    const double gap = tr_sum[1].hit_pct - tr_sum[0].hit_pct;
    c.require(std::abs(gap - 26.3) <= 0.1,
              "intelligibility gap " + fmt("%.3f", gap) + " not within 26.3 +/- 0.1");

    const double elapsed = seconds_since(start);
    c.require(elapsed < 1.0, "runtime " + fmt("%.2f", elapsed) + " s >= 1 s");
}

// shared state between criteria 2, 8 and 9
struct TrainedArtifacts {
    std::string manifest;
    std::string model = "";
    std::string wav = "";
    test_support::ScratchDir dir{"acc_pipeline"};
};

void criterion_2_em_monotonic(TrainedArtifacts& artifacts) {
    Criterion c(2, "20 EM iterations on the toy corpus: non-decreasing log-likelihood");
    const auto start = std::chrono::steady_clock::now();

    artifacts.manifest = test_support::write_toy_corpus(artifacts.dir.path());
    artifacts.model = artifacts.dir.file("toy.voz");
    const int rc = test_support::run_cli("train '" + artifacts.manifest + "' '" +
                                         artifacts.model + "' --states 5 --iters 20 --seed 0");
    c.require(rc == 0, "train exited " + std::to_string(rc));

    std::ifstream in(artifacts.model + ".loglik.csv");
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> trace;
    while (std::getline(in, line))
        trace.push_back(std::stod(line.substr(line.find(',') + 1)));
    c.require(trace.size() == 20, "expected 20 trace rows, got " + std::to_string(trace.size()));
    for (size_t i = 1; i < trace.size(); ++i)
        c.require(trace[i] >= trace[i - 1] - 1e-6,
                  "log-likelihood drops at iteration " + std::to_string(i + 1));

    const double elapsed = seconds_since(start);
    c.require(elapsed < 30.0, "runtime " + fmt("%.1f", elapsed) + " s >= 30 s");
}

void criterion_3_inference_oracles() {
    Criterion c(3, "viterbi and forward-backward match brute-force enumeration");
    std::mt19937_64 gen(2024);
    double max_dev = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n_states = 1 + int(gen() % 4);
        const int frames = n_states + int(gen() % (9 - size_t(n_states)));
        auto toy = test_oracles::make_toy(gen, n_states, frames, trial % 2 == 1);

        const auto oracle = test_oracles::brute_force(toy.chain, toy.obs);
        const auto vit = voz::viterbi(toy.chain, toy.obs);
        const auto fb = voz::forward_backward(toy.chain, toy.obs);

        max_dev = std::max(max_dev, std::abs(vit.log_likelihood - oracle.viterbi_loglik));
        max_dev = std::max(max_dev, std::abs(fb.log_likelihood - oracle.log_likelihood));
        for (size_t t = 0; t < toy.obs.frames.size(); ++t)
            for (int i = 0; i < n_states; ++i)
                max_dev = std::max(max_dev,
                                   std::abs(fb.gamma[t][size_t(i)] - oracle.gamma[t][size_t(i)]));
    }
    c.require(max_dev < 1e-9,
              "max deviation " + fmt("%.3g", max_dev) + " >= 1e-9 over 200 instances");
}

void criterion_4_mlpg_oracle() {
    Criterion c(4, "banded trajectory solve equals the dense normal-equations oracle");
    std::mt19937_64 gen(777);
    double max_dev = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const size_t T = 3 + gen() % 48;
        const size_t dims = 1 + gen() % 8;  // M <= 8
        for (size_t m = 0; m < dims; ++m) {
            std::vector<std::array<double, 3>> means(T), vars(T);
            for (size_t t = 0; t < T; ++t)
                for (int s = 0; s < 3; ++s) {
                    means[t][size_t(s)] = 4.0 * test_support::uniform(gen) - 2.0;
                    vars[t][size_t(s)] = 0.05 + test_support::uniform(gen);
                }
            const auto banded = voz::mlpg_track(means, vars);
            const auto dense = test_oracles::dense_mlpg(means, vars);
            for (size_t t = 0; t < T; ++t)
                max_dev = std::max(max_dev, std::abs(banded[t] - dense[t]));
        }
    }
    c.require(max_dev < 1e-8,
              "max deviation " + fmt("%.3g", max_dev) + " >= 1e-8 over 100 instances");
}

void criterion_5_gaussian_contract() {
    Criterion c(5, "Gaussian density integrates to 1 and hits 1/(2 pi) at the 2-D mean");

    const double mu = 0.7, var = 2.3;
    voz::GaussianStream g1{{mu}, {var}};
    const double sigma = std::sqrt(var);
    const size_t points = 100000;
    const double lo = mu - 8.0 * sigma, hi = mu + 8.0 * sigma;
    const double h = (hi - lo) / double(points - 1);
    double acc = 0.0;
    for (size_t i = 0; i < points; ++i) {
        const double x = lo + h * double(i);
        const double f = std::exp(voz::gaussian_logpdf(std::vector<double>{x}, g1));
        acc += (i == 0 || i + 1 == points) ? 0.5 * f : f;
    }
    c.require(std::abs(acc * h - 1.0) < 1e-6,
              "1-D integral deviates by " + fmt("%.3g", std::abs(acc * h - 1.0)));

    voz::GaussianStream g2{{0.0, 0.0}, {1.0, 1.0}};
    const double at_mean = std::exp(voz::gaussian_logpdf(std::vector<double>{0.0, 0.0}, g2));
    c.require(std::abs(at_mean - 1.0 / (2.0 * std::numbers::pi)) < 1e-12,
              "2-D density at the mean deviates from 1/(2 pi)");
}

void criterion_6_f0_oracle() {
    Criterion c(6, "F0 tracker: sines within 2 Hz on 95% of interior frames, silence unvoiced");
    for (double freq : {80.0, 120.0, 220.0, 300.0}) {
        const voz::AudioBuffer audio = test_support::sine(freq, 1.0, 0.5);
        const auto track = voz::extract_f0(audio, 60.0, 400.0);
        // interior frames: full correlation window (25 ms + max lag) inside the signal
        const size_t window = 400 + size_t(std::ceil(16000.0 / 60.0));
        const size_t interior = (audio.samples.size() - window) / 80 + 1;
        size_t good = 0;
        for (size_t t = 0; t < interior; ++t)
            if (track[t].voiced && std::abs(track[t].f0_hz - freq) <= 2.0) ++good;
        c.require(double(good) >= 0.95 * double(interior),
                  fmt("%.0f", freq) + " Hz sine: only " + std::to_string(good) + "/" +
                      std::to_string(interior) + " interior frames within 2 Hz");
    }
    const auto silent = voz::extract_f0(test_support::silence(1.0), 60.0, 400.0);
    for (const auto& f : silent)
        if (f.voiced) {
            c.require(false, "silence produced a voiced frame");
            break;
        }
}

void criterion_7_copy_synthesis() {
    Criterion c(7, "copy-synthesis: mel-cepstral distortion <= 1.5 dB, F0 within 10 Hz");
    const voz::AnalysisConfig cfg;
    const voz::AudioBuffer vowel = test_support::synthetic_vowel(120.0, 1.0);
    const voz::AudioBuffer out = voz::copy_synthesis(vowel, cfg, 0);

    const voz::FeatureSequence original = voz::analyze(vowel, cfg);
    const voz::FeatureSequence resynth = voz::analyze(out, cfg);
    const size_t frames = std::min(original.frames.size(), resynth.frames.size());
    double mcd = 0.0;
    for (size_t t = 0; t < frames; ++t) {
        double sq = 0.0;
        for (size_t m = 1; m < original.frames[t].mcep.size(); ++m) {
            const double d = original.frames[t].mcep[m] - resynth.frames[t].mcep[m];
            sq += d * d;
        }
        mcd += (10.0 / std::numbers::ln10) * std::sqrt(2.0 * sq);
    }
    mcd /= double(frames);
    c.require(mcd <= 1.5, "mean mel-cepstral distortion " + fmt("%.3f", mcd) + " dB > 1.5 dB");

    const auto f_in = voz::extract_f0(vowel, cfg.f0_min, cfg.f0_max);
    const auto f_out = voz::extract_f0(out, cfg.f0_min, cfg.f0_max);
    std::vector<double> in_hz, out_hz;
    for (const auto& f : f_in)
        if (f.voiced) in_hz.push_back(f.f0_hz);
    for (const auto& f : f_out)
        if (f.voiced) out_hz.push_back(f.f0_hz);
    c.require(!in_hz.empty() && !out_hz.empty(), "no voiced frames found");
    if (!in_hz.empty() && !out_hz.empty()) {
        std::sort(in_hz.begin(), in_hz.end());
        std::sort(out_hz.begin(), out_hz.end());
        const double dev = std::abs(in_hz[in_hz.size() / 2] - out_hz[out_hz.size() / 2]);
        c.require(dev <= 10.0, "median F0 deviates by " + fmt("%.2f", dev) + " Hz > 10 Hz");
    }
}

void criterion_8_end_to_end(TrainedArtifacts& artifacts, double* train_elapsed) {
    Criterion c(8, "end-to-end: train toy corpus, synthesize 'pala tortuga'");
    const auto start = std::chrono::steady_clock::now();

    artifacts.wav = artifacts.dir.file("pala_tortuga.wav");
    const int rc = test_support::run_cli("synth '" + artifacts.model + "' '" + artifacts.wav +
                                         "' --text 'pala tortuga' --seed 0");
    c.require(rc == 0, "synth exited " + std::to_string(rc));

    const voz::AudioBuffer out = voz::read_wav(artifacts.wav);
    bool finite = true, clipping_free = true;
    for (double s : out.samples) {
        finite = finite && std::isfinite(s);
        clipping_free = clipping_free && std::abs(s) <= 1.0;
    }
    c.require(finite, "non-finite samples in output");
    c.require(clipping_free, "clipped samples in output");

    // duration must match the plan within one frame
    const voz::ModelSet models = voz::load_model_set(artifacts.model);
    const voz::PhoneticSpec spec = voz::g2p(voz::normalize_text("pala tortuga"));
    const voz::StateTrajectoryPlan plan = voz::predict_durations(spec, models, 1.0);
    const long planned = long(plan.total_frames()) * 80;
    const long got = long(out.samples.size());
    c.require(std::labs(got - planned) <= 80,
              "duration " + std::to_string(got) + " samples vs plan " + std::to_string(planned));

    const double elapsed = seconds_since(start) + *train_elapsed;
    c.require(elapsed < 60.0, "train+synth runtime " + fmt("%.1f", elapsed) + " s >= 60 s");
}

void criterion_9_determinism(TrainedArtifacts& artifacts) {
    Criterion c(9, "same seed reruns produce byte-identical model and WAV files");

    const std::string model2 = artifacts.dir.file("toy_rerun.voz");
    int rc = test_support::run_cli("train '" + artifacts.manifest + "' '" + model2 +
                                   "' --states 5 --iters 20 --seed 0");
    c.require(rc == 0, "re-train exited " + std::to_string(rc));
    c.require(test_support::read_file(artifacts.model) == test_support::read_file(model2),
              "model files differ between runs");
    c.require(test_support::read_file(artifacts.model + ".loglik.csv") ==
                  test_support::read_file(model2 + ".loglik.csv"),
              "log-likelihood traces differ between runs");

    const std::string wav2 = artifacts.dir.file("pala_tortuga_rerun.wav");
    rc = test_support::run_cli("synth '" + artifacts.model + "' '" + wav2 +
                               "' --text 'pala tortuga' --seed 0");
    c.require(rc == 0, "re-synth exited " + std::to_string(rc));
    c.require(test_support::read_file(artifacts.wav) == test_support::read_file(wav2),
              "WAV files differ between runs");
}

}  // namespace

int main() {
    criterion_1_eval_fixtures();

    TrainedArtifacts artifacts;
    const auto train_start = std::chrono::steady_clock::now();
    criterion_2_em_monotonic(artifacts);
    double train_elapsed = seconds_since(train_start);

    criterion_3_inference_oracles();
    criterion_4_mlpg_oracle();
    criterion_5_gaussian_contract();
    criterion_6_f0_oracle();
    criterion_7_copy_synthesis();
    criterion_8_end_to_end(artifacts, &train_elapsed);
    criterion_9_determinism(artifacts);

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
