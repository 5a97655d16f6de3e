#include "emosteer/report.hpp"

#include "emosteer/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace emosteer {

namespace {

std::string fmt(double value, int digits = 3) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

std::string fmt_opt(const std::optional<double>& value, int digits = 3) {
    return value ? fmt(*value, digits) : std::string("n.n.");
}

std::optional<double> quality_mean(const ApproachResult& r, const std::string& key) {
    const auto it = r.quality.find(key);
    if (it == r.quality.end() || it->second.count == 0) return std::nullopt;
    return it->second.mean;
}

// Minimal standalone SVG bar chart.
class SvgChart {
public:
    SvgChart(int width, int height, std::string title)
        : width_(width), height_(height), title_(std::move(title)) {}

    void add_group(const std::string& label, const std::vector<std::pair<std::string, double>>& bars) {
        groups_.push_back({label, bars});
    }

    void write(const std::filesystem::path& path) const {
        std::size_t total_bars = 0;
        for (const auto& g : groups_) total_bars += g.bars.size();
        if (total_bars == 0) throw ValidationError("nothing to plot");

        const int margin_left = 50;
        const int margin_bottom = 120;
        const int margin_top = 40;
        const int plot_w = width_ - margin_left - 20;
        const int plot_h = height_ - margin_top - margin_bottom;
        const double slot =
            static_cast<double>(plot_w) / (static_cast<double>(total_bars) + groups_.size());

        static const char* palette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52",
                                        "#8172b3", "#937860", "#da8bc3"};

        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
            << height_ << "\">\n";
        svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg << "<text x=\"" << width_ / 2 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";

        // y axis with 0.25 gridlines, range [0,1]
        for (int i = 0; i <= 4; ++i) {
            const double frac = i / 4.0;
            const int y = margin_top + static_cast<int>((1.0 - frac) * plot_h);
            svg << "<line x1=\"" << margin_left << "\" y1=\"" << y << "\" x2=\""
                << margin_left + plot_w << "\" y2=\"" << y
                << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
            svg << "<text x=\"" << margin_left - 6 << "\" y=\"" << y + 4
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
                << fmt(frac, 2) << "</text>\n";
        }

        double x = margin_left;
        std::size_t color_index = 0;
        for (const auto& g : groups_) {
            const double group_start = x;
            for (const auto& [name, value] : g.bars) {
                const double clamped = std::clamp(value, 0.0, 1.0);
                const int bar_h = static_cast<int>(clamped * plot_h);
                const int y = margin_top + plot_h - bar_h;
                svg << "<rect x=\"" << fmt(x, 1) << "\" y=\"" << y << "\" width=\""
                    << fmt(slot * 0.85, 1) << "\" height=\"" << bar_h << "\" fill=\""
                    << palette[color_index % 7] << "\"/>\n";
                svg << "<text x=\"" << fmt(x + slot * 0.42, 1) << "\" y=\""
                    << margin_top + plot_h + 10 << "\" text-anchor=\"end\" "
                    << "font-family=\"sans-serif\" font-size=\"9\" transform=\"rotate(-60 "
                    << fmt(x + slot * 0.42, 1) << " " << margin_top + plot_h + 10 << ")\">"
                    << name << "</text>\n";
                svg << "<text x=\"" << fmt(x + slot * 0.42, 1) << "\" y=\"" << y - 3
                    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"8\">"
                    << fmt(value, 3) << "</text>\n";
                x += slot;
                ++color_index;
            }
            svg << "<text x=\"" << fmt((group_start + x) / 2, 1) << "\" y=\""
                << height_ - 8 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                << "font-size=\"11\" font-weight=\"bold\">" << g.label << "</text>\n";
            x += slot; // gap between groups
            color_index = 0;
        }
        svg << "</svg>\n";

        std::ofstream out(path);
        if (!out) throw ValidationError("cannot write " + path.string());
        out << svg.str();
    }

private:
    struct Group {
        std::string label;
        std::vector<std::pair<std::string, double>> bars;
    };
    int width_;
    int height_;
    std::string title_;
    std::vector<Group> groups_;
};

} // namespace

std::vector<ApproachResult> summarize_results(const std::vector<ResponseRecord>& records) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<ResponseRecord>> grouped;
    std::map<std::string, std::string> stages;
    for (const auto& record : records) {
        if (grouped.count(record.approach_id) == 0) order.push_back(record.approach_id);
        stages[record.approach_id] = record.stage;
        grouped[record.approach_id].push_back(record);
    }
    std::vector<ApproachResult> summaries;
    summaries.reserve(order.size());
    for (const auto& id : order) {
        summaries.push_back(aggregate_approach(id, stages[id], std::move(grouped[id])));
    }
    return summaries;
}

std::string render_score_table(const std::vector<ApproachResult>& summaries) {
    std::ostringstream out;
    out << "approach                      stage                  factual  subject. combined\n";
    out << "----------------------------- ---------------------- -------- -------- --------\n";
    for (const auto& s : summaries) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-29s %-22s %8s %8s %8s\n", s.approach_id.c_str(),
                      s.stage.c_str(), fmt_opt(s.score.factual).c_str(),
                      fmt_opt(s.score.subjective).c_str(), fmt_opt(s.score.combined).c_str());
        out << line;
    }
    return out.str();
}

void write_summary_csv(const std::vector<ApproachResult>& summaries,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << "approach,emotion,bertscore,correctness,distinct1,distinct2,fres\n";
    for (const auto& s : summaries) {
        auto cell = [](const std::optional<double>& v) {
            return v ? fmt(*v, 6) : std::string{};
        };
        out << s.approach_id << ',' << cell(s.score.combined) << ','
            << cell(quality_mean(s, "bertscore_f1")) << ',' << cell(quality_mean(s, "correct"))
            << ',' << cell(quality_mean(s, "distinct1")) << ','
            << cell(quality_mean(s, "distinct2")) << ',' << cell(quality_mean(s, "fres")) << '\n';
    }
}

void write_emotion_scores_svg(const std::vector<ApproachResult>& summaries,
                              const std::filesystem::path& path) {
    std::vector<std::string> stage_order;
    std::map<std::string, std::vector<const ApproachResult*>> by_stage;
    for (const auto& s : summaries) {
        if (!s.score.combined) continue;
        if (by_stage.count(s.stage) == 0) stage_order.push_back(s.stage);
        by_stage[s.stage].push_back(&s);
    }
    if (stage_order.empty()) throw ValidationError("no scored approaches to plot");

    std::size_t bars = 0;
    for (const auto& stage : stage_order) bars += by_stage[stage].size();
    SvgChart chart(std::max<int>(640, static_cast<int>(bars) * 42 + 160), 420,
                   "Emotion Score by approach (combined)");
    for (const auto& stage : stage_order) {
        std::vector<std::pair<std::string, double>> group;
        for (const ApproachResult* s : by_stage[stage]) {
            group.emplace_back(s->approach_id, s->score.combined.value_or(0.0));
        }
        chart.add_group(stage, group);
    }
    chart.write(path);
}

void write_quality_svg(const std::vector<ApproachResult>& summaries,
                       const std::filesystem::path& path) {
    // Best approach per stage by combined score (first wins ties), plus the
    // baseline.
    std::vector<std::string> stage_order;
    std::map<std::string, const ApproachResult*> best;
    const ApproachResult* baseline = nullptr;
    for (const auto& s : summaries) {
        if (s.approach_id == "vanilla") {
            baseline = &s;
            continue;
        }
        if (!s.score.combined) continue;
        if (best.count(s.stage) == 0) {
            stage_order.push_back(s.stage);
            best[s.stage] = &s;
        } else if (*s.score.combined > *best[s.stage]->score.combined) {
            best[s.stage] = &s;
        }
    }

    SvgChart chart(900, 420, "Text quality of the best approach per stage");
    auto add = [&](const ApproachResult& s) {
        std::vector<std::pair<std::string, double>> group;
        if (s.score.combined) group.emplace_back("emotion", *s.score.combined);
        for (const auto& [key, label] :
             std::vector<std::pair<std::string, std::string>>{{"bertscore_f1", "bertscore"},
                                                              {"correct", "correctness"},
                                                              {"distinct1", "dist-1"},
                                                              {"distinct2", "dist-2"},
                                                              {"fres", "fres"}}) {
            if (const auto v = quality_mean(s, key)) group.emplace_back(label, *v);
        }
        if (!group.empty()) chart.add_group(s.approach_id, group);
    };
    if (baseline != nullptr) add(*baseline);
    for (const auto& stage : stage_order) add(*best[stage]);
    chart.write(path);
}

std::string render_baseline_table(const BaselineTable& table) {
    // Columns: labels with non-zero totals, ordered by descending total then
    // canonical order.
    const auto totals = table.totals();
    std::vector<std::size_t> columns;
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        if (totals[i] > 0) columns.push_back(i);
    }
    std::stable_sort(columns.begin(), columns.end(),
                     [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });

    std::ostringstream out;
    out << "kind       ";
    for (const auto c : columns) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), " %10s", std::string(to_string(static_cast<EmotionLabel>(c))).c_str());
        out << buf;
    }
    out << '\n';
    auto row = [&](const std::string& name, const std::array<int, kLabelCount>& counts) {
        char head[24];
        std::snprintf(head, sizeof(head), "%-11s", name.c_str());
        out << head;
        for (const auto c : columns) {
            char buf[24];
            std::snprintf(buf, sizeof(buf), " %10d", counts[c]);
            out << buf;
        }
        out << '\n';
    };
    if (const auto it = table.counts.find(QueryKind::factual); it != table.counts.end()) {
        row("factual", it->second);
    }
    if (const auto it = table.counts.find(QueryKind::subjective); it != table.counts.end()) {
        row("subjective", it->second);
    }
    row("total", totals);
    return out.str();
}

} // namespace emosteer
