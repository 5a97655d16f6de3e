#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace emosteer {

/// Ekman's six basic emotions plus a neutral label.
///
/// The six non-neutral members are the only legal steering targets; neutral
/// exists solely as a classifier output. Enumerator order is the canonical
/// order used everywhere (alphabetical targets, neutral last), so iterating
/// the enum values and breaking ties on the first maximum implements the
/// documented tie rule for free.
enum class EmotionLabel : int {
    anger = 0,
    disgust,
    fear,
    joy,
    sadness,
    surprise,
    neutral,
};

inline constexpr std::size_t kLabelCount = 7;
inline constexpr std::size_t kTargetCount = 6;

/// All seven labels in canonical order.
const std::array<EmotionLabel, kLabelCount>& all_labels();

/// The six target emotions in canonical alphabetical order (no neutral).
const std::array<EmotionLabel, kTargetCount>& target_emotions();

bool is_target(EmotionLabel e);

/// Canonical lowercase string ("anger", ..., "neutral"); the wire/file form.
std::string_view to_string(EmotionLabel e);

/// Case-insensitive parse of the seven canonical labels.
/// Throws ValidationError naming the offending string.
EmotionLabel parse_emotion(std::string_view s);

/// Probability distribution over the seven labels, indexed by enum value.
class EmotionDistribution {
public:
    EmotionDistribution() { values_.fill(0.0); }

    double& operator[](EmotionLabel e) { return values_[static_cast<std::size_t>(e)]; }
    double operator[](EmotionLabel e) const { return values_[static_cast<std::size_t>(e)]; }

    double sum() const;

    /// Label with the largest probability; ties break by canonical label
    /// order with neutral last.
    EmotionLabel argmax() const;

    /// Throws ValidationError unless every value is in [0,1] and the total
    /// is 1 within `tol`.
    void validate(double tol = 1e-6) const;

    /// Scales values so they sum to exactly 1. Throws if the sum is zero.
    void normalize();

    static EmotionDistribution point_mass(EmotionLabel e);

    bool operator==(const EmotionDistribution& other) const { return values_ == other.values_; }

private:
    std::array<double, kLabelCount> values_;
};

} // namespace emosteer
