// Micro-benchmarks for the per-frame analysis kernels, chain inference and
// trajectory generation.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "voz/features.hpp"
#include "voz/generate.hpp"
#include "voz/hmm.hpp"
#include "voz/vocoder.hpp"

namespace {

voz::AudioBuffer bench_signal(double seconds) {
    voz::AudioBuffer buf;
    buf.sample_rate = 16000;
    const size_t n = size_t(seconds * 16000);
    buf.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double t = double(i) / 16000.0;
        buf.samples[i] = 0.4 * std::sin(2.0 * std::numbers::pi * 120.0 * t) +
                         0.2 * std::sin(2.0 * std::numbers::pi * 850.0 * t);
    }
    return buf;
}

voz::ModelSet bench_models(int n_states, int order) {
    std::mt19937_64 gen(1);
    const auto uniform = [&] { return double(gen() >> 11) * 0x1.0p-53; };
    voz::ModelSet m;
    m.meta.n_states = n_states;
    m.meta.analysis.order = order;
    const size_t dim = 3 * size_t(order + 1);
    m.meta.spectral_floor.assign(dim, 1e-8);
    voz::LeftRightHMM hmm;
    for (int s = 0; s < n_states; ++s) {
        voz::StateEmission e;
        e.spectral.mean.resize(dim);
        e.spectral.var.resize(dim);
        for (size_t k = 0; k < dim; ++k) {
            e.spectral.mean[k] = uniform() - 0.5;
            e.spectral.var[k] = 0.2 + uniform();
        }
        e.pitch.voiced_weight = 0.7;
        e.pitch.voiced_gauss.mean = {4.8 + 0.1 * uniform(), 0.0, 0.0};
        e.pitch.voiced_gauss.var = {0.05, 0.01, 0.01};
        hmm.emissions.push_back(e);
        hmm.self_loop.push_back(0.6);
    }
    for (const char* symbol : {"sil", "p", "a", "l", "t", "o", "u", "g", "sp", "ɾ"}) {
        m.models.emplace(symbol, hmm);
        voz::DurationModel dur;
        dur.mean.assign(size_t(n_states), 5.0);
        dur.var.assign(size_t(n_states), 2.0);
        m.durations.emplace(symbol, dur);
    }
    return m;
}

voz::FeatureSequence bench_features(const voz::ModelSet& models, int frames) {
    std::mt19937_64 gen(2);
    const auto uniform = [&] { return double(gen() >> 11) * 0x1.0p-53; };
    voz::FeatureSequence seq;
    seq.order = models.meta.analysis.order;
    seq.has_deltas = true;
    const size_t dim = 3 * size_t(seq.order + 1);
    for (int t = 0; t < frames; ++t) {
        voz::FrameVector fv;
        fv.mcep.resize(dim);
        for (size_t k = 0; k < dim; ++k) fv.mcep[k] = uniform() - 0.5;
        fv.voiced = t % 3 != 0;
        if (fv.voiced) fv.lf0 = {4.8, 0.0, 0.0};
        seq.frames.push_back(fv);
    }
    return seq;
}

void BM_MelCepstrum(benchmark::State& state) {
    const auto frames = voz::frame_signal(bench_signal(0.5), 0.025, 0.005);
    size_t t = 0;
    for (auto _ : state) {
        auto c = voz::mel_cepstrum(frames[t % frames.size()], 24, 0.42);
        benchmark::DoNotOptimize(c);
        ++t;
    }
}
BENCHMARK(BM_MelCepstrum);

void BM_ExtractF0_1s(benchmark::State& state) {
    const auto audio = bench_signal(1.0);
    for (auto _ : state) {
        auto track = voz::extract_f0(audio, 60.0, 400.0);
        benchmark::DoNotOptimize(track);
    }
}
BENCHMARK(BM_ExtractF0_1s);

void BM_ForwardBackward(benchmark::State& state) {
    const auto models = bench_models(5, 24);
    const auto spec = voz::PhoneticSpec::from_line("sil p a l a sp t o ɾ t u g a sil");
    const auto chain = voz::compose_utterance_hmm(spec, models);
    const auto obs = bench_features(models, int(state.range(0)));
    for (auto _ : state) {
        auto fb = voz::forward_backward(chain, obs);
        benchmark::DoNotOptimize(fb);
    }
}
BENCHMARK(BM_ForwardBackward)->Arg(100)->Arg(200)->Arg(400);

void BM_Viterbi(benchmark::State& state) {
    const auto models = bench_models(5, 24);
    const auto spec = voz::PhoneticSpec::from_line("sil p a l a sp t o ɾ t u g a sil");
    const auto chain = voz::compose_utterance_hmm(spec, models);
    const auto obs = bench_features(models, int(state.range(0)));
    for (auto _ : state) {
        auto vit = voz::viterbi(chain, obs);
        benchmark::DoNotOptimize(vit);
    }
}
BENCHMARK(BM_Viterbi)->Arg(200);

void BM_Mlpg(benchmark::State& state) {
    const auto models = bench_models(5, 24);
    const auto spec = voz::PhoneticSpec::from_line("sil p a l a sp t o ɾ t u g a sil");
    const auto plan = voz::predict_durations(spec, models, 1.0);
    for (auto _ : state) {
        auto traj = voz::mlpg(plan, models);
        benchmark::DoNotOptimize(traj);
    }
}
BENCHMARK(BM_Mlpg);

void BM_Synthesize_1s(benchmark::State& state) {
    const int frames = 200;
    std::vector<voz::F0Frame> contour(frames, {true, 120.0});
    const auto excitation = voz::build_excitation(contour, 0.005, 16000, 0, 60.0, 400.0);
    std::vector<std::vector<double>> mcep(frames, std::vector<double>(25, 0.0));
    for (auto& c : mcep) c[0] = 0.2;
    for (auto _ : state) {
        auto out = voz::synthesize_raw(mcep, excitation, 0.42, 16000, 0.005);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_Synthesize_1s);

}  // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
