#include "voz/hmm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "voz/error.hpp"

namespace voz {

double log_add(double a, double b) {
    if (is_log_zero(a)) return b;
    if (is_log_zero(b)) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

double gaussian_logpdf(std::span<const double> obs, const GaussianStream& g) {
    if (obs.size() != g.mean.size() || g.mean.size() != g.var.size())
        throw std::logic_error("gaussian_logpdf: dimension mismatch");
    double acc = 0.0;
    for (size_t k = 0; k < obs.size(); ++k) {
        const double d = obs[k] - g.mean[k];
        acc += std::log(2.0 * std::numbers::pi * g.var[k]) + d * d / g.var[k];
    }
    return -0.5 * acc;
}

double msd_logpdf(bool voiced, std::span<const double> value, const MSDStream& s) {
    if (!voiced) {
        const double q = 1.0 - s.voiced_weight;
        return q > 0.0 ? std::log(q) : kLogZero;
    }
    if (s.voiced_weight <= 0.0) return kLogZero;
    return std::log(s.voiced_weight) + gaussian_logpdf(value, s.voiced_gauss);
}

double emission_logpdf(const FrameVector& frame, const StateEmission& e) {
    const double spec = gaussian_logpdf(frame.mcep, e.spectral);
    const double pitch = msd_logpdf(frame.voiced, frame.lf0, e.pitch);
    if (is_log_zero(spec) || is_log_zero(pitch)) return kLogZero;
    return spec + pitch;
}

UtteranceChain compose_utterance_hmm(const PhoneticSpec& spec, const ModelSet& models) {
    UtteranceChain chain;
    for (const Phoneme& ph : spec.phones) {
        const auto it = models.models.find(ph.symbol);
        if (it == models.models.end())
            throw Error("no model for phoneme '" + ph.symbol + "'");
        const LeftRightHMM& hmm = it->second;
        for (int s = 0; s < hmm.n_states(); ++s)
            chain.entries.push_back({&hmm.emissions[size_t(s)], hmm.self_loop[size_t(s)],
                                     ph.symbol, s});
    }
    return chain;
}

namespace {

// emission log-probabilities for every (frame, state) pair
std::vector<std::vector<double>> emission_table(const UtteranceChain& chain,
                                                const FeatureSequence& obs) {
    const size_t T = obs.frames.size();
    const size_t N = chain.entries.size();
    std::vector<std::vector<double>> e(T, std::vector<double>(N));
    for (size_t t = 0; t < T; ++t)
        for (size_t i = 0; i < N; ++i)
            e[t][i] = emission_logpdf(obs.frames[t], *chain.entries[i].emission);
    return e;
}

void check_feasible(const UtteranceChain& chain, const FeatureSequence& obs) {
    if (chain.entries.empty()) throw Error("empty chain");
    if (obs.frames.size() < chain.entries.size())
        throw Error("infeasible alignment: " + std::to_string(obs.frames.size()) +
                    " frames for " + std::to_string(chain.entries.size()) + " chain states");
}

}  // namespace

ViterbiResult viterbi(const UtteranceChain& chain, const FeatureSequence& obs) {
    check_feasible(chain, obs);
    const size_t T = obs.frames.size();
    const size_t N = chain.entries.size();
    const auto emis = emission_table(chain, obs);

    std::vector<double> log_self(N), log_next(N);
    for (size_t i = 0; i < N; ++i) {
        const double a = chain.entries[i].self_loop;
        log_self[i] = a > 0.0 ? std::log(a) : kLogZero;
        log_next[i] = a < 1.0 ? std::log(1.0 - a) : kLogZero;
    }

    std::vector<std::vector<double>> delta(T, std::vector<double>(N, kLogZero));
    std::vector<std::vector<uint8_t>> from_prev(T, std::vector<uint8_t>(N, 0));

    delta[0][0] = emis[0][0];
    for (size_t t = 1; t < T; ++t) {
        for (size_t i = 0; i < N; ++i) {
            if (is_log_zero(emis[t][i])) continue;
            const double stay = is_log_zero(delta[t - 1][i]) ? kLogZero
                                                             : delta[t - 1][i] + log_self[i];
            const double advance = (i > 0 && !is_log_zero(delta[t - 1][i - 1]))
                                       ? delta[t - 1][i - 1] + log_next[i - 1]
                                       : kLogZero;
            if (is_log_zero(stay) && is_log_zero(advance)) continue;
            if (advance > stay) {
                delta[t][i] = advance + emis[t][i];
                from_prev[t][i] = 1;
            } else {
                delta[t][i] = stay + emis[t][i];
            }
        }
    }

    ViterbiResult res;
    res.log_likelihood = delta[T - 1][N - 1];
    if (is_log_zero(res.log_likelihood))
        throw Error("viterbi: utterance has zero likelihood under the model");

    res.path.resize(T);
    size_t i = N - 1;
    for (size_t t = T; t-- > 0;) {
        res.path[t] = int(i);
        if (t > 0 && from_prev[t][i]) --i;
    }
    return res;
}

ForwardBackwardResult forward_backward(const UtteranceChain& chain, const FeatureSequence& obs) {
    check_feasible(chain, obs);
    const size_t T = obs.frames.size();
    const size_t N = chain.entries.size();
    const auto emis = emission_table(chain, obs);

    std::vector<double> log_self(N), log_next(N);
    for (size_t i = 0; i < N; ++i) {
        const double a = chain.entries[i].self_loop;
        log_self[i] = a > 0.0 ? std::log(a) : kLogZero;
        log_next[i] = a < 1.0 ? std::log(1.0 - a) : kLogZero;
    }

    std::vector<std::vector<double>> alpha(T, std::vector<double>(N, kLogZero));
    std::vector<std::vector<double>> beta(T, std::vector<double>(N, kLogZero));

    alpha[0][0] = emis[0][0];
    for (size_t t = 1; t < T; ++t) {
        for (size_t i = 0; i < N; ++i) {
            double in = is_log_zero(alpha[t - 1][i]) ? kLogZero : alpha[t - 1][i] + log_self[i];
            if (i > 0 && !is_log_zero(alpha[t - 1][i - 1]))
                in = log_add(in, alpha[t - 1][i - 1] + log_next[i - 1]);
            alpha[t][i] = is_log_zero(in) || is_log_zero(emis[t][i]) ? kLogZero
                                                                    : in + emis[t][i];
        }
    }

    beta[T - 1][N - 1] = 0.0;
    for (size_t t = T - 1; t-- > 0;) {
        for (size_t i = 0; i < N; ++i) {
            double out = is_log_zero(beta[t + 1][i]) || is_log_zero(emis[t + 1][i])
                             ? kLogZero
                             : log_self[i] + emis[t + 1][i] + beta[t + 1][i];
            if (i + 1 < N && !is_log_zero(beta[t + 1][i + 1]) && !is_log_zero(emis[t + 1][i + 1]))
                out = log_add(out, log_next[i] + emis[t + 1][i + 1] + beta[t + 1][i + 1]);
            beta[t][i] = out;
        }
    }

    ForwardBackwardResult res;
    res.log_likelihood = alpha[T - 1][N - 1];
    if (is_log_zero(res.log_likelihood))
        throw Error("forward_backward: utterance has zero likelihood under the model");

    res.gamma.assign(T, std::vector<double>(N, 0.0));
    for (size_t t = 0; t < T; ++t)
        for (size_t i = 0; i < N; ++i) {
            const double g = alpha[t][i] + beta[t][i] - res.log_likelihood;
            if (!is_log_zero(alpha[t][i]) && !is_log_zero(beta[t][i]))
                res.gamma[t][i] = std::exp(g);
        }

    res.expected_self.assign(N, 0.0);
    res.expected_trans_occ.assign(N, 0.0);
    for (size_t t = 0; t + 1 < T; ++t) {
        for (size_t i = 0; i < N; ++i) {
            if (is_log_zero(alpha[t][i])) continue;
            res.expected_trans_occ[i] += res.gamma[t][i];
            if (!is_log_zero(beta[t + 1][i]) && !is_log_zero(emis[t + 1][i])) {
                const double xi = alpha[t][i] + log_self[i] + emis[t + 1][i] + beta[t + 1][i] -
                                  res.log_likelihood;
                res.expected_self[i] += std::exp(xi);
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Accumulation and re-estimation
// ---------------------------------------------------------------------------

StatsAccumulator::StatsAccumulator(const ModelSet& models) : spectral_dim_(0) {
    if (!models.models.empty() && !models.models.begin()->second.emissions.empty())
        spectral_dim_ = models.models.begin()->second.emissions.front().spectral.mean.size();
    for (const auto& [phoneme, hmm] : models.models) {
        auto& v = stats_[phoneme];
        v.resize(size_t(hmm.n_states()));
        for (auto& s : v) {
            s.sum.assign(spectral_dim_, 0.0);
            s.sum_sq.assign(spectral_dim_, 0.0);
        }
    }
}

void StatsAccumulator::add(const UtteranceChain& chain, const FeatureSequence& obs,
                           const ForwardBackwardResult& fb) {
    const size_t T = obs.frames.size();
    const size_t N = chain.entries.size();
    for (size_t i = 0; i < N; ++i) {
        const auto& entry = chain.entries[i];
        StateStats& st = stats_.at(entry.phoneme)[size_t(entry.state)];
        for (size_t t = 0; t < T; ++t) {
            const double g = fb.gamma[t][i];
            if (g == 0.0) continue;
            const FrameVector& fv = obs.frames[t];
            st.occ += g;
            for (size_t k = 0; k < spectral_dim_; ++k) {
                st.sum[k] += g * fv.mcep[k];
                st.sum_sq[k] += g * fv.mcep[k] * fv.mcep[k];
            }
            if (fv.voiced) {
                st.voiced_occ += g;
                for (size_t k = 0; k < 3; ++k) {
                    st.lf0_sum[k] += g * fv.lf0[k];
                    st.lf0_sum_sq[k] += g * fv.lf0[k] * fv.lf0[k];
                }
            }
        }
        st.trans_self += fb.expected_self[i];
        st.trans_occ += fb.expected_trans_occ[i];
    }
}

const StatsAccumulator::StateStats& StatsAccumulator::stats(const std::string& phoneme,
                                                            int state) const {
    return stats_.at(phoneme).at(size_t(state));
}

UpdateResult accumulate_and_update(const ModelSet& prev, const StatsAccumulator& acc) {
    constexpr double kMinOcc = 1e-8;
    constexpr double kLoopEps = 1e-8;  // keeps a_ii strictly inside (0,1)

    UpdateResult out;
    out.models = prev;

    for (auto& [phoneme, hmm] : out.models.models) {
        double total_occ = 0.0;
        for (int s = 0; s < hmm.n_states(); ++s) total_occ += acc.stats(phoneme, s).occ;
        if (total_occ < kMinOcc) {
            out.untouched.push_back(phoneme);
            continue;
        }

        for (int s = 0; s < hmm.n_states(); ++s) {
            const auto& st = acc.stats(phoneme, s);
            if (st.occ < kMinOcc) continue;  // state never reached: keep its parameters

            StateEmission& e = hmm.emissions[size_t(s)];
            for (size_t k = 0; k < st.sum.size(); ++k) {
                const double mean = st.sum[k] / st.occ;
                const double var = st.sum_sq[k] / st.occ - mean * mean;
                e.spectral.mean[k] = mean;
                e.spectral.var[k] = std::max(var, prev.meta.spectral_floor[k]);
            }

            e.pitch.voiced_weight = st.voiced_occ / st.occ;
            if (st.voiced_occ >= kMinOcc) {
                for (size_t k = 0; k < 3; ++k) {
                    const double mean = st.lf0_sum[k] / st.voiced_occ;
                    const double var = st.lf0_sum_sq[k] / st.voiced_occ - mean * mean;
                    e.pitch.voiced_gauss.mean[k] = mean;
                    e.pitch.voiced_gauss.var[k] = std::max(var, prev.meta.lf0_floor);
                }
            }

            if (st.trans_occ >= kMinOcc) {
                const double a = st.trans_self / st.trans_occ;
                hmm.self_loop[size_t(s)] = std::clamp(a, kLoopEps, 1.0 - kLoopEps);
            }
        }
    }
    return out;
}

}  // namespace voz
