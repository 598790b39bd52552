#include "lcm/pair_counts.hpp"

#include "lcm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lcm {

PairCounts::PairCounts(std::size_t num_verbs, std::size_t num_nouns, std::vector<PairEntry> entries)
    : num_verbs_(num_verbs), num_nouns_(num_nouns) {
    for (const auto& e : entries) {
        if (e.verb >= num_verbs || e.noun >= num_nouns) {
            throw ValidationError("pair index (" + std::to_string(e.verb) + ", " + std::to_string(e.noun) +
                                  ") outside vocabulary");
        }
        if (!(e.count > 0.0) || !std::isfinite(e.count)) {
            throw ValidationError("pair count must be positive and finite");
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const PairEntry& a, const PairEntry& b) {
        return a.verb != b.verb ? a.verb < b.verb : a.noun < b.noun;
    });
    for (const auto& e : entries) {
        if (!entries_.empty() && entries_.back().verb == e.verb && entries_.back().noun == e.noun) {
            entries_.back().count += e.count;
        } else {
            entries_.push_back(e);
        }
    }
    for (const auto& e : entries_) total_tokens_ += e.count;
}

double PairCounts::count(SymbolIndex verb, SymbolIndex noun) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{verb, noun},
                               [](const PairEntry& e, const std::pair<SymbolIndex, SymbolIndex>& key) {
                                   return e.verb != key.first ? e.verb < key.first : e.noun < key.second;
                               });
    if (it != entries_.end() && it->verb == verb && it->noun == noun) return it->count;
    return 0.0;
}

std::vector<double> PairCounts::verb_tokens() const {
    std::vector<double> out(num_verbs_, 0.0);
    for (const auto& e : entries_) out[e.verb] += e.count;
    return out;
}

std::vector<double> PairCounts::noun_tokens() const {
    std::vector<double> out(num_nouns_, 0.0);
    for (const auto& e : entries_) out[e.noun] += e.count;
    return out;
}

std::pair<PairCounts, double> remap_counts(const PairCounts& counts, const Vocabulary& from, const Vocabulary& to) {
    std::vector<PairEntry> mapped;
    mapped.reserve(counts.type_count());
    double dropped = 0.0;
    for (const auto& e : counts.entries()) {
        auto v = to.verbs.find(from.verbs.at(e.verb));
        auto n = to.nouns.find(from.nouns.at(e.noun));
        if (v && n) {
            mapped.push_back({*v, *n, e.count});
        } else {
            dropped += e.count;
        }
    }
    return {PairCounts(to.verbs.size(), to.nouns.size(), std::move(mapped)), dropped};
}

}  // namespace lcm
