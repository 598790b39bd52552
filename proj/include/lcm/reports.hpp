#pragma once

#include "lcm/evaluation.hpp"
#include "lcm/model.hpp"
#include "lcm/pair_counts.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lcm {

struct RankedSymbol {
    SymbolIndex index = 0;
    double prob = 0.0;
};

/// The most probable verbs and nouns of one class, plus which of their
/// combinations occur in the training data.
struct ClassReport {
    std::size_t class_index = 0;
    double class_prob = 0.0;
    std::vector<RankedSymbol> top_verbs;
    std::vector<RankedSymbol> top_nouns;
    /// seen[i][j]: (top_verbs[i], top_nouns[j]) has a positive count.
    std::vector<std::vector<bool>> seen;
};

/// Lists are sorted by probability descending, ties by index, and truncated
/// to the vocabulary size. `data` must be indexed against the model's
/// vocabulary. Throws IndexError for an invalid class.
ClassReport class_report(const LCModel& model, const PairCounts& data, std::size_t class_index, std::size_t top_verbs,
                         std::size_t top_nouns);

/// Fixed-width text matrix: a header with the class index and p(c), noun
/// columns with p(n|c), one row per verb with p(v|c), `.` on seen cells.
std::string render_class_report(const ClassReport& report, const Vocabulary& vocabulary);

/// Metric rows followed by seed-aggregated rows for every
/// (num_classes, iterations, metric), whose seed column reads `mean`, `min`
/// and `max`. Throws EmptyResultsError on no rows.
std::string emit_curves(std::span<const MetricRow> rows);

}  // namespace lcm
