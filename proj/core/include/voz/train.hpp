#pragma once

#include <string>
#include <vector>

#include "voz/features.hpp"
#include "voz/hmm.hpp"
#include "voz/textproc.hpp"

namespace voz {

struct TrainingUtterance {
    std::string id;
    FeatureSequence features;  // with deltas
    PhoneticSpec spec;
};

/// Initialize every inventory phoneme with the corpus-global statistics:
/// all state means/variances from the pooled frames, self-loops at 0.6,
/// MSD weights at the global voiced fraction. Also fixes the variance
/// floors (1e-4 of the global per-dimension variance for the spectral
/// stream, absolute 1e-4 for lf0).
ModelSet flat_start(const std::vector<TrainingUtterance>& corpus,
                    const std::vector<std::string>& inventory, int n_states);

struct TrainResult {
    ModelSet models;
    std::vector<double> loglik_trace;   // one corpus log-likelihood per iteration
    std::vector<std::string> skipped;   // utterances shorter than their chain
};

/// Embedded Baum-Welch: iterations of (compose chains -> forward_backward ->
/// accumulate_and_update). The trace entry for iteration i is the corpus
/// log-likelihood under the parameters entering that iteration, so it is
/// non-decreasing.
TrainResult embedded_train(ModelSet models, const std::vector<TrainingUtterance>& corpus,
                           int iterations);

struct AlignmentRow {
    std::string utterance_id;
    std::string phoneme;
    int state = 0;
    int begin_frame = 0;  // inclusive
    int end_frame = 0;    // exclusive
};

struct DurationEstimate {
    ModelSet models;
    std::vector<std::string> unaligned;     // phonemes never reached, flat values kept
    std::vector<AlignmentRow> alignments;
};

/// Viterbi-align every usable utterance and estimate per-state duration
/// means/variances (population variance, floored at 1 frame^2).
DurationEstimate estimate_durations(ModelSet models,
                                    const std::vector<TrainingUtterance>& corpus);

}  // namespace voz
