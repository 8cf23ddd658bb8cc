#include "voz/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "voz/error.hpp"

namespace voz {

namespace {

constexpr double kInitialSelfLoop = 0.6;
constexpr double kSpectralFloorScale = 1e-4;
constexpr double kSpectralFloorAbs = 1e-8;
constexpr double kLf0FloorAbs = 1e-4;
constexpr double kDurationVarFloor = 1.0;

bool chain_fits(const TrainingUtterance& utt, int n_states) {
    return utt.features.frames.size() >= utt.spec.phones.size() * std::size_t(n_states);
}

}  // namespace

ModelSet flat_start(const std::vector<TrainingUtterance>& corpus,
                    const std::vector<std::string>& inventory, int n_states) {
    if (corpus.empty()) throw Error("flat_start: empty corpus");
    if (n_states < 1) throw Error("flat_start: need at least one state");

    const FeatureSequence& first = corpus.front().features;
    if (!first.has_deltas) throw Error("flat_start: features must carry deltas");
    const std::size_t dim = first.spectral_dim();

    // corpus-global statistics
    std::vector<double> sum(dim, 0.0), sum_sq(dim, 0.0);
    std::array<double, 3> lf0_sum{}, lf0_sum_sq{};
    double frames = 0.0, voiced_frames = 0.0;
    double total_frames_per_utt = 0.0, total_states_per_utt = 0.0;

    for (const TrainingUtterance& utt : corpus) {
        if (utt.features.spectral_dim() != dim)
            throw Error("flat_start: inconsistent feature dimensions in corpus");
        for (const FrameVector& fv : utt.features.frames) {
            frames += 1.0;
            for (std::size_t k = 0; k < dim; ++k) {
                sum[k] += fv.mcep[k];
                sum_sq[k] += fv.mcep[k] * fv.mcep[k];
            }
            if (fv.voiced) {
                voiced_frames += 1.0;
                for (std::size_t k = 0; k < 3; ++k) {
                    lf0_sum[k] += fv.lf0[k];
                    lf0_sum_sq[k] += fv.lf0[k] * fv.lf0[k];
                }
            }
        }
        total_frames_per_utt += double(utt.features.frames.size());
        total_states_per_utt += double(utt.spec.phones.size() * std::size_t(n_states));
    }
    if (frames == 0.0) throw Error("flat_start: corpus has no frames");

    ModelSet m;
    m.meta.analysis.sample_rate = first.sample_rate;
    m.meta.analysis.frame_shift_s = first.frame_shift_s;
    m.meta.analysis.order = first.order;
    m.meta.n_states = n_states;

    GaussianStream spectral;
    spectral.mean.resize(dim);
    spectral.var.resize(dim);
    m.meta.spectral_floor.resize(dim);
    m.meta.lf0_floor = kLf0FloorAbs;
    for (std::size_t k = 0; k < dim; ++k) {
        const double mean = sum[k] / frames;
        const double var = std::max(sum_sq[k] / frames - mean * mean, 0.0);
        m.meta.spectral_floor[k] = std::max(kSpectralFloorScale * var, kSpectralFloorAbs);
        spectral.mean[k] = mean;
        spectral.var[k] = std::max(var, m.meta.spectral_floor[k]);
    }

    MSDStream pitch;
    pitch.voiced_weight = voiced_frames / frames;
    pitch.voiced_gauss.mean.assign(3, 0.0);
    pitch.voiced_gauss.var.assign(3, 1.0);
    if (voiced_frames > 0.0) {
        for (std::size_t k = 0; k < 3; ++k) {
            const double mean = lf0_sum[k] / voiced_frames;
            const double var = lf0_sum_sq[k] / voiced_frames - mean * mean;
            pitch.voiced_gauss.mean[k] = mean;
            pitch.voiced_gauss.var[k] = std::max(var, m.meta.lf0_floor);
        }
    } else {
        pitch.voiced_gauss.mean = {std::log(120.0), 0.0, 0.0};  // inert when weight is 0
    }

    const double dur_mean =
        std::max(1.0, (total_frames_per_utt / double(corpus.size())) /
                          (total_states_per_utt / double(corpus.size())));
    const double dur_var = std::max(dur_mean, kDurationVarFloor);

    StateEmission emission{spectral, pitch};
    for (const std::string& symbol : inventory) {
        LeftRightHMM hmm;
        hmm.self_loop.assign(std::size_t(n_states), kInitialSelfLoop);
        hmm.emissions.assign(std::size_t(n_states), emission);
        m.models.emplace(symbol, std::move(hmm));
        DurationModel dur;
        dur.mean.assign(std::size_t(n_states), dur_mean);
        dur.var.assign(std::size_t(n_states), dur_var);
        m.durations.emplace(symbol, std::move(dur));
    }
    return m;
}

TrainResult embedded_train(ModelSet models, const std::vector<TrainingUtterance>& corpus,
                           int iterations) {
    TrainResult result;

    std::vector<const TrainingUtterance*> usable;
    for (const TrainingUtterance& utt : corpus) {
        if (chain_fits(utt, models.meta.n_states))
            usable.push_back(&utt);
        else
            result.skipped.push_back(utt.id);
    }
    if (usable.empty()) throw Error("embedded_train: every utterance is shorter than its chain");

    for (int iter = 0; iter < iterations; ++iter) {
        StatsAccumulator acc(models);
        double total_loglik = 0.0;
        for (const TrainingUtterance* utt : usable) {  // fixed order: reproducible
            const UtteranceChain chain = compose_utterance_hmm(utt->spec, models);
            const ForwardBackwardResult fb = forward_backward(chain, utt->features);
            acc.add(chain, utt->features, fb);
            total_loglik += fb.log_likelihood;
        }
        result.loglik_trace.push_back(total_loglik);
        UpdateResult update = accumulate_and_update(models, acc);
        models = std::move(update.models);
    }

    result.models = std::move(models);
    return result;
}

DurationEstimate estimate_durations(ModelSet models,
                                    const std::vector<TrainingUtterance>& corpus) {
    std::map<std::string, std::vector<std::vector<double>>> runs;  // phoneme -> state -> lengths
    for (const auto& [symbol, hmm] : models.models)
        runs[symbol].resize(std::size_t(hmm.n_states()));

    DurationEstimate out;
    for (const TrainingUtterance& utt : corpus) {
        if (!chain_fits(utt, models.meta.n_states)) continue;
        const UtteranceChain chain = compose_utterance_hmm(utt.spec, models);
        const ViterbiResult vit = viterbi(chain, utt.features);

        std::size_t t = 0;
        while (t < vit.path.size()) {
            std::size_t end = t;
            while (end < vit.path.size() && vit.path[end] == vit.path[t]) ++end;
            const auto& entry = chain.entries[std::size_t(vit.path[t])];
            runs[entry.phoneme][std::size_t(entry.state)].push_back(double(end - t));
            out.alignments.push_back(
                {utt.id, entry.phoneme, entry.state, int(t), int(end)});
            t = end;
        }
    }

    for (auto& [symbol, dur] : models.durations) {
        bool touched = false;
        for (std::size_t s = 0; s < dur.mean.size(); ++s) {
            const std::vector<double>& lengths = runs[symbol][s];
            if (lengths.empty()) continue;
            touched = true;
            double mean = 0.0;
            for (double v : lengths) mean += v;
            mean /= double(lengths.size());
            double var = 0.0;
            for (double v : lengths) var += (v - mean) * (v - mean);
            var /= double(lengths.size());
            dur.mean[s] = std::max(mean, 1.0);
            dur.var[s] = std::max(var, kDurationVarFloor);
        }
        if (!touched) out.unaligned.push_back(symbol);
    }

    out.models = std::move(models);
    return out;
}

}  // namespace voz
