#include "lcm/reports.hpp"

#include "lcm/errors.hpp"
#include "lcm/text_util.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace lcm {
namespace {

std::vector<RankedSymbol> rank(std::span<const double> table, std::size_t num_classes, std::size_t c,
                               std::size_t top) {
    const std::size_t symbols = table.size() / num_classes;
    std::vector<RankedSymbol> all(symbols);
    for (std::size_t s = 0; s < symbols; ++s) all[s] = {static_cast<SymbolIndex>(s), table[s * num_classes + c]};
    std::stable_sort(all.begin(), all.end(), [](const RankedSymbol& a, const RankedSymbol& b) {
        return a.prob > b.prob;
    });
    all.resize(std::min(top, symbols));
    return all;
}

}  // namespace

ClassReport class_report(const LCModel& model, const PairCounts& data, std::size_t class_index, std::size_t top_verbs,
                         std::size_t top_nouns) {
    if (class_index >= model.num_classes()) {
        throw IndexError("class " + std::to_string(class_index) + " out of range (model has " +
                         std::to_string(model.num_classes()) + ")");
    }
    if (data.num_verbs() > model.num_verbs() || data.num_nouns() > model.num_nouns()) {
        throw IndexError("data indices exceed model vocabulary");
    }
    ClassReport r;
    r.class_index = class_index;
    r.class_prob = model.class_prior()[class_index];
    r.top_verbs = rank(model.verb_table(), model.num_classes(), class_index, top_verbs);
    r.top_nouns = rank(model.noun_table(), model.num_classes(), class_index, top_nouns);
    r.seen.assign(r.top_verbs.size(), std::vector<bool>(r.top_nouns.size(), false));
    for (std::size_t i = 0; i < r.top_verbs.size(); ++i) {
        for (std::size_t j = 0; j < r.top_nouns.size(); ++j) {
            r.seen[i][j] = data.contains(r.top_verbs[i].index, r.top_nouns[j].index);
        }
    }
    return r;
}

std::string render_class_report(const ClassReport& report, const Vocabulary& vocabulary) {
    // Column headers are printed as a legend (index -> noun) since rotated
    // labels do not work in plain text.
    std::size_t verb_width = 4;
    for (const auto& v : report.top_verbs) verb_width = std::max(verb_width, vocabulary.verbs.at(v.index).size());
    const std::size_t cell = 7;

    std::string out = "Class " + std::to_string(report.class_index) + "  PROB " + format_fixed(report.class_prob, 4) +
                      "\n\nNouns:\n";
    for (std::size_t j = 0; j < report.top_nouns.size(); ++j) {
        out += "  [" + std::to_string(j + 1) + "] " + vocabulary.nouns.at(report.top_nouns[j].index) + "  " +
               format_fixed(report.top_nouns[j].prob, 4) + '\n';
    }
    out += '\n';
    auto pad_left = [](std::string s, std::size_t width) {
        return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
    };
    out += std::string(verb_width + 2 + 6, ' ');
    for (std::size_t j = 0; j < report.top_nouns.size(); ++j) out += pad_left("[" + std::to_string(j + 1) + "]", cell);
    out += '\n';
    out += std::string(verb_width + 2 + 6, ' ');
    for (const auto& n : report.top_nouns) out += pad_left(format_fixed(n.prob, 4), cell);
    out += '\n';
    for (std::size_t i = 0; i < report.top_verbs.size(); ++i) {
        const auto& name = vocabulary.verbs.at(report.top_verbs[i].index);
        out += name + std::string(verb_width - name.size() + 2, ' ') + format_fixed(report.top_verbs[i].prob, 4);
        for (std::size_t j = 0; j < report.top_nouns.size(); ++j) {
            out += pad_left(report.seen[i][j] ? "." : "", cell);
        }
        out += '\n';
    }
    return out;
}

std::string emit_curves(std::span<const MetricRow> rows) {
    if (rows.empty()) throw EmptyResultsError("no metric rows to emit");
    std::string out = "num_classes\titerations\tseed\tmetric\tvalue\n";
    struct Agg {
        double sum = 0.0, min = 0.0, max = 0.0;
        std::size_t n = 0;
    };
    std::map<std::tuple<std::size_t, std::size_t, std::string>, Agg> groups;
    for (const auto& r : rows) {
        out += std::to_string(r.num_classes) + '\t' + std::to_string(r.iterations) + '\t' + std::to_string(r.seed) +
               '\t' + r.metric + '\t' + format_real(r.value) + '\n';
        auto& g = groups[{r.num_classes, r.iterations, r.metric}];
        g.min = g.n == 0 ? r.value : std::min(g.min, r.value);
        g.max = g.n == 0 ? r.value : std::max(g.max, r.value);
        g.sum += r.value;
        ++g.n;
    }
    for (const auto& [key, g] : groups) {
        const auto& [classes, iterations, metric] = key;
        const std::string prefix = std::to_string(classes) + '\t' + std::to_string(iterations) + '\t';
        out += prefix + "mean\t" + metric + '\t' + format_real(g.sum / static_cast<double>(g.n)) + '\n';
        out += prefix + "min\t" + metric + '\t' + format_real(g.min) + '\n';
        out += prefix + "max\t" + metric + '\t' + format_real(g.max) + '\n';
    }
    return out;
}

}  // namespace lcm
