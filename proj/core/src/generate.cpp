#include "voz/generate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "voz/banded.hpp"
#include "voz/error.hpp"

namespace voz {

namespace {

// The delta and delta-delta windows reach one frame to each side, so the
// normal equations have bandwidth 2.
constexpr int kWindowReach = 1;
constexpr std::size_t kBandwidth = 2 * kWindowReach;
static_assert(kBandwidth == 2, "delta window reach determines the band structure");

struct Tap {
    int offset;
    double coef;
};

// Window rows for frame t of a T-frame trajectory, with edge replication:
// x_{-1} := x_0 and x_T := x_{T-1}.
//   stream 0 (static):  x_t
//   stream 1 (delta):   0.5 (x_{t+1} - x_{t-1})
//   stream 2 (delta2):  x_{t+1} - 2 x_t + x_{t-1}
std::size_t window_taps(int stream, std::size_t t, std::size_t total, Tap taps[3]) {
    const bool first = t == 0;
    const bool last = t + 1 == total;
    switch (stream) {
        case 0:
            taps[0] = {0, 1.0};
            return 1;
        case 1:
            if (first) {
                taps[0] = {0, -0.5};
                taps[1] = {1, 0.5};
            } else if (last) {
                taps[0] = {-1, -0.5};
                taps[1] = {0, 0.5};
            } else {
                taps[0] = {-1, -0.5};
                taps[1] = {1, 0.5};
            }
            return 2;
        default:
            if (first) {
                taps[0] = {0, -1.0};
                taps[1] = {1, 1.0};
                return 2;
            }
            if (last) {
                taps[0] = {-1, 1.0};
                taps[1] = {0, -1.0};
                return 2;
            }
            taps[0] = {-1, 1.0};
            taps[1] = {0, -2.0};
            taps[2] = {1, 1.0};
            return 3;
    }
}

}  // namespace

int StateTrajectoryPlan::total_frames() const {
    int total = 0;
    for (const Step& s : steps) total += s.frames;
    return total;
}

StateTrajectoryPlan predict_durations(const PhoneticSpec& spec, const ModelSet& models,
                                      double rate) {
    if (!(rate > 0.0)) throw Error("predict_durations: rate factor must be positive");

    StateTrajectoryPlan plan;
    for (const Phoneme& ph : spec.phones) {
        const auto it = models.durations.find(ph.symbol);
        if (it == models.durations.end())
            throw Error("no duration model for phoneme '" + ph.symbol + "'");
        const DurationModel& dur = it->second;
        for (std::size_t s = 0; s < dur.mean.size(); ++s) {
            const int frames = std::max(1, int(std::floor(rate * dur.mean[s] + 0.5)));
            plan.steps.push_back({ph.symbol, int(s), frames});
        }
    }
    return plan;
}

std::vector<double> mlpg_track(std::span<const std::array<double, 3>> means,
                               std::span<const std::array<double, 3>> vars) {
    const std::size_t total = means.size();
    if (total != vars.size()) throw std::logic_error("mlpg_track: size mismatch");
    if (total < 3) throw Error("mlpg_track: need at least 3 frames");

    BandedSPDMatrix a(total, kBandwidth);
    std::vector<double> rhs(total, 0.0);

    Tap taps[3];
    for (std::size_t t = 0; t < total; ++t) {
        for (int stream = 0; stream < 3; ++stream) {
            const double var = vars[t][std::size_t(stream)];
            if (!(var > 0.0)) throw std::logic_error("mlpg_track: non-positive variance");
            if (std::isinf(var)) continue;  // precision 0: row drops out
            const double w = 1.0 / var;
            const double mu = means[t][std::size_t(stream)];
            const std::size_t n = window_taps(stream, t, total, taps);
            for (std::size_t p = 0; p < n; ++p) {
                const std::size_t ip = std::size_t(int(t) + taps[p].offset);
                rhs[ip] += w * taps[p].coef * mu;
                for (std::size_t q = 0; q < n; ++q) {
                    const std::size_t iq = std::size_t(int(t) + taps[q].offset);
                    if (ip >= iq) a.add(ip, iq, w * taps[p].coef * taps[q].coef);
                }
            }
        }
    }
    return solve_banded_spd(std::move(a), std::move(rhs));
}

std::vector<std::vector<double>> mlpg(const StateTrajectoryPlan& plan, const ModelSet& models) {
    const std::size_t T = std::size_t(plan.total_frames());
    if (T < 3) throw Error("mlpg: trajectory needs at least 3 frames");

    const std::size_t dim = std::size_t(models.meta.analysis.order) + 1;

    // per-frame emission pointers, expanded from the plan
    std::vector<const StateEmission*> emission(T);
    std::size_t t = 0;
    for (const auto& step : plan.steps) {
        const auto it = models.models.find(step.phoneme);
        if (it == models.models.end())
            throw Error("no model for phoneme '" + step.phoneme + "'");
        for (int k = 0; k < step.frames; ++k)
            emission[t++] = &it->second.emissions[std::size_t(step.state)];
    }

    std::vector<std::vector<double>> traj(T, std::vector<double>(dim));
    std::vector<std::array<double, 3>> means(T), vars(T);
    for (std::size_t m = 0; m < dim; ++m) {
        for (std::size_t i = 0; i < T; ++i) {
            const GaussianStream& g = emission[i]->spectral;
            means[i] = {g.mean[m], g.mean[dim + m], g.mean[2 * dim + m]};
            vars[i] = {g.var[m], g.var[dim + m], g.var[2 * dim + m]};
        }
        const std::vector<double> c = mlpg_track(means, vars);
        for (std::size_t i = 0; i < T; ++i) traj[i][m] = c[i];
    }
    return traj;
}

std::vector<F0Frame> generate_f0(const StateTrajectoryPlan& plan, const ModelSet& models) {
    const std::size_t T = std::size_t(plan.total_frames());
    if (T < 3) throw Error("generate_f0: trajectory needs at least 3 frames");

    std::vector<const MSDStream*> pitch(T);
    std::size_t t = 0;
    for (const auto& step : plan.steps) {
        const auto it = models.models.find(step.phoneme);
        if (it == models.models.end())
            throw Error("no model for phoneme '" + step.phoneme + "'");
        for (int k = 0; k < step.frames; ++k)
            pitch[t++] = &it->second.emissions[std::size_t(step.state)].pitch;
    }

    std::vector<F0Frame> track(T);
    std::size_t begin = 0;
    while (begin < T) {
        if (pitch[begin]->voiced_weight <= 0.5) {
            ++begin;
            continue;
        }
        std::size_t end = begin;
        while (end < T && pitch[end]->voiced_weight > 0.5) ++end;
        const std::size_t run = end - begin;
        if (run >= 3) {
            std::vector<std::array<double, 3>> means(run), vars(run);
            for (std::size_t k = 0; k < run; ++k) {
                const GaussianStream& g = pitch[begin + k]->voiced_gauss;
                means[k] = {g.mean[0], g.mean[1], g.mean[2]};
                vars[k] = {g.var[0], g.var[1], g.var[2]};
            }
            const std::vector<double> lf0 = mlpg_track(means, vars);
            for (std::size_t k = 0; k < run; ++k)
                track[begin + k] = {true, std::exp(lf0[k])};
        } else {
            for (std::size_t k = begin; k < end; ++k)
                track[k] = {true, std::exp(pitch[k]->voiced_gauss.mean[0])};
        }
        begin = end;
    }
    return track;
}

}  // namespace voz
