#include "emosteer/emotions.hpp"

#include "emosteer/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace emosteer {

namespace {

constexpr std::array<std::string_view, kLabelCount> kLabelNames = {
    "anger", "disgust", "fear", "joy", "sadness", "surprise", "neutral",
};

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

const std::array<EmotionLabel, kLabelCount>& all_labels() {
    static const std::array<EmotionLabel, kLabelCount> labels = {
        EmotionLabel::anger,   EmotionLabel::disgust, EmotionLabel::fear,    EmotionLabel::joy,
        EmotionLabel::sadness, EmotionLabel::surprise, EmotionLabel::neutral,
    };
    return labels;
}

const std::array<EmotionLabel, kTargetCount>& target_emotions() {
    static const std::array<EmotionLabel, kTargetCount> targets = {
        EmotionLabel::anger, EmotionLabel::disgust,  EmotionLabel::fear,
        EmotionLabel::joy,   EmotionLabel::sadness,  EmotionLabel::surprise,
    };
    return targets;
}

bool is_target(EmotionLabel e) {
    return e != EmotionLabel::neutral;
}

std::string_view to_string(EmotionLabel e) {
    return kLabelNames[static_cast<std::size_t>(e)];
}

EmotionLabel parse_emotion(std::string_view s) {
    const std::string lower = lowercase(s);
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        if (lower == kLabelNames[i]) {
            return static_cast<EmotionLabel>(i);
        }
    }
    throw ValidationError("unknown emotion label: '" + std::string(s) + "'");
}

double EmotionDistribution::sum() const {
    double total = 0.0;
    for (double v : values_) total += v;
    return total;
}

EmotionLabel EmotionDistribution::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kLabelCount; ++i) {
        if (values_[i] > values_[best]) best = i;
    }
    return static_cast<EmotionLabel>(best);
}

void EmotionDistribution::validate(double tol) const {
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        if (!(values_[i] >= 0.0 && values_[i] <= 1.0) || std::isnan(values_[i])) {
            throw ValidationError("probability for '" + std::string(kLabelNames[i]) +
                                  "' outside [0,1]");
        }
    }
    if (std::abs(sum() - 1.0) > tol) {
        throw ValidationError("label distribution does not sum to 1");
    }
}

void EmotionDistribution::normalize() {
    const double total = sum();
    if (total <= 0.0) {
        throw ValidationError("cannot normalize an all-zero distribution");
    }
    for (double& v : values_) v /= total;
}

EmotionDistribution EmotionDistribution::point_mass(EmotionLabel e) {
    EmotionDistribution d;
    d[e] = 1.0;
    return d;
}

} // namespace emosteer
