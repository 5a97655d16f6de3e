#pragma once

// Independent brute-force weighted-F1 oracle: explicit 7x7 confusion matrix,
// per-class precision/recall/F1, support weighting. Kept deliberately free of
// the library's metric code so the two routes stay independent.

#include "emosteer/emotions.hpp"

#include <vector>

namespace emosteer::testing {

inline double brute_force_weighted_f1(const std::vector<EmotionLabel>& targets,
                                      const std::vector<EmotionLabel>& predictions) {
    double confusion[7][7] = {};
    for (std::size_t i = 0; i < targets.size(); ++i) {
        confusion[static_cast<int>(targets[i])][static_cast<int>(predictions[i])] += 1.0;
    }
    double score = 0.0;
    const double n = static_cast<double>(targets.size());
    for (int c = 0; c < 7; ++c) {
        double support = 0.0;
        for (int p = 0; p < 7; ++p) support += confusion[c][p];
        if (support == 0.0) continue;
        double predicted = 0.0;
        for (int t = 0; t < 7; ++t) predicted += confusion[t][c];
        const double tp = confusion[c][c];
        const double precision = predicted > 0.0 ? tp / predicted : 0.0;
        const double recall = tp / support;
        double f1 = 0.0;
        if (precision + recall > 0.0) f1 = 2.0 * precision * recall / (precision + recall);
        score += (support / n) * f1;
    }
    return score;
}

} // namespace emosteer::testing
