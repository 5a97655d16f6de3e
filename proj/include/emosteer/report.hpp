#pragma once

#include "emosteer/domain.hpp"
#include "emosteer/pipeline.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace emosteer {

/// Per-approach aggregates recomputed from raw records. Reports are pure
/// functions of the results file.
std::vector<ApproachResult> summarize_results(const std::vector<ResponseRecord>& records);

/// Emotion Scores per approach (factual / subjective / combined), one row
/// per approach in run order. Undefined scores print as "n.n.".
std::string render_score_table(const std::vector<ApproachResult>& summaries);

/// summary.csv with the columns approach, emotion, bertscore, correctness,
/// distinct1, distinct2, fres.
void write_summary_csv(const std::vector<ApproachResult>& summaries,
                       const std::filesystem::path& path);

/// Grouped bar chart of Emotion Scores (factual/subjective/combined per
/// approach, grouped by stage), as a standalone SVG file.
void write_emotion_scores_svg(const std::vector<ApproachResult>& summaries,
                              const std::filesystem::path& path);

/// Quality metrics of each stage's best approach plus the baseline.
void write_quality_svg(const std::vector<ApproachResult>& summaries,
                       const std::filesystem::path& path);

/// The baseline dominant-emotion distribution table (counts per query kind).
std::string render_baseline_table(const BaselineTable& table);

} // namespace emosteer
