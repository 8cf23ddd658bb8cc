#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "voz/features.hpp"
#include "voz/textproc.hpp"

namespace voz {

// Log-zero sentinel for impossible events; all probability arithmetic stays
// in log space.
inline constexpr double kLogZero = -1.0e10;

inline bool is_log_zero(double x) { return x <= kLogZero / 2.0; }

/// log(exp(a) + exp(b)) without leaving log space.
double log_add(double a, double b);

/// Diagonal-covariance Gaussian over one feature stream.
struct GaussianStream {
    std::vector<double> mean;
    std::vector<double> var;  // diagonal, each entry above the training floor
};

/// log N(obs; mean, diag(var)) = -0.5 sum_k [ log(2 pi var_k) + (o_k-mu_k)^2/var_k ]
double gaussian_logpdf(std::span<const double> obs, const GaussianStream& g);

/// Multi-space stream for log F0: a discrete voiced/unvoiced mass plus a
/// Gaussian over (lf0, dlf0, ddlf0) in the voiced space.
struct MSDStream {
    double voiced_weight = 0.5;  // w in [0,1]
    GaussianStream voiced_gauss;
};

/// Unvoiced -> log(1-w); voiced value v -> log(w) + gaussian_logpdf(v).
double msd_logpdf(bool voiced, std::span<const double> value, const MSDStream& s);

struct StateEmission {
    GaussianStream spectral;  // mcep static+delta+delta2
    MSDStream pitch;
};

double emission_logpdf(const FrameVector& frame, const StateEmission& e);

/// Left-to-right chain: state i transitions only to i or i+1, entry is
/// always at the first state, so a_ii per state is the whole matrix.
struct LeftRightHMM {
    std::vector<double> self_loop;        // a_ii in (0,1), one per state
    std::vector<StateEmission> emissions;

    int n_states() const { return int(self_loop.size()); }
};

/// Per-state occupancy statistics in frames.
struct DurationModel {
    std::vector<double> mean;  // >= 1
    std::vector<double> var;   // >= 1 frame^2
};

struct ModelMeta {
    AnalysisConfig analysis;
    int n_states = 5;
    std::vector<double> spectral_floor;  // per-dimension variance floor
    double lf0_floor = 1e-4;
};

struct ModelSet {
    std::map<std::string, LeftRightHMM> models;      // keyed by phoneme symbol
    std::map<std::string, DurationModel> durations;
    ModelMeta meta;

    size_t spectral_dim() const { return 3 * (size_t(meta.analysis.order) + 1); }
};

/// Utterance-level chain: the phoneme HMMs of a phonetic specification
/// concatenated in order. Emission pointers refer into the source ModelSet,
/// which must outlive the chain and stay unmodified while it is in use.
struct UtteranceChain {
    struct Entry {
        const StateEmission* emission = nullptr;
        double self_loop = 0.0;
        std::string phoneme;
        int state = 0;  // state index within the phoneme model
    };
    std::vector<Entry> entries;

    int n_states() const { return int(entries.size()); }
};

UtteranceChain compose_utterance_hmm(const PhoneticSpec& spec, const ModelSet& models);

struct ViterbiResult {
    std::vector<int> path;  // chain state index per frame, monotone non-decreasing
    double log_likelihood = kLogZero;
};

/// Best monotone path entering the first state at t=0 and leaving the last
/// state at t=T-1. Throws when T < n_states (no feasible alignment).
ViterbiResult viterbi(const UtteranceChain& chain, const FeatureSequence& obs);

struct ForwardBackwardResult {
    std::vector<std::vector<double>> gamma;   // [T][n_states], rows sum to 1
    double log_likelihood = kLogZero;
    std::vector<double> expected_self;        // per state: sum_t xi_t(i,i)
    std::vector<double> expected_trans_occ;   // per state: sum_{t<T-1} gamma_t(i)
};

ForwardBackwardResult forward_backward(const UtteranceChain& chain, const FeatureSequence& obs);

/// Baum-Welch sufficient statistics over a corpus, keyed by (phoneme, state).
class StatsAccumulator {
public:
    explicit StatsAccumulator(const ModelSet& models);

    /// Fold one utterance's occupancies into the accumulator.
    void add(const UtteranceChain& chain, const FeatureSequence& obs,
             const ForwardBackwardResult& fb);

    struct StateStats {
        double occ = 0.0;                       // sum gamma
        std::vector<double> sum, sum_sq;        // spectral
        double voiced_occ = 0.0;                // sum gamma over voiced frames
        std::array<double, 3> lf0_sum{}, lf0_sum_sq{};
        double trans_self = 0.0;                // expected self transitions
        double trans_occ = 0.0;                 // expected transitions out
    };

    const StateStats& stats(const std::string& phoneme, int state) const;

private:
    friend struct UpdateAccess;
    std::map<std::string, std::vector<StateStats>> stats_;
    size_t spectral_dim_;
};

struct UpdateResult {
    ModelSet models;
    std::vector<std::string> untouched;  // phonemes with zero occupancy, kept as-is
};

/// M-step: occupancy-weighted means and floored variances, self-loop
/// probabilities from expected transition counts, MSD weights from voiced
/// occupancy mass. Zero-occupancy phonemes keep their previous parameters.
UpdateResult accumulate_and_update(const ModelSet& prev, const StatsAccumulator& acc);

}  // namespace voz
