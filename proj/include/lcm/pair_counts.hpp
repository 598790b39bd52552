#pragma once

#include "lcm/vocabulary.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lcm {

struct PairEntry {
    SymbolIndex verb = 0;
    SymbolIndex noun = 0;
    double count = 0.0;

    friend bool operator==(const PairEntry&, const PairEntry&) = default;
};

/// Sparse sample of observed (verb, noun) types with their frequencies f(y).
///
/// Entries are unique, strictly positive and kept sorted by (verb, noun);
/// every routine that sums over the sample walks them in this order.
class PairCounts {
public:
    PairCounts() = default;

    /// Builds from possibly duplicated entries; duplicates are summed.
    /// Throws ValidationError on non-positive counts or indices outside
    /// [0, num_verbs) x [0, num_nouns).
    PairCounts(std::size_t num_verbs, std::size_t num_nouns, std::vector<PairEntry> entries);

    std::span<const PairEntry> entries() const noexcept { return entries_; }
    std::size_t num_verbs() const noexcept { return num_verbs_; }
    std::size_t num_nouns() const noexcept { return num_nouns_; }
    std::size_t type_count() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    double total_tokens() const noexcept { return total_tokens_; }

    /// f(v, n), 0 when the pair is unobserved.
    double count(SymbolIndex verb, SymbolIndex noun) const;
    bool contains(SymbolIndex verb, SymbolIndex noun) const { return count(verb, noun) > 0.0; }

    /// Token frequency of each verb / noun.
    std::vector<double> verb_tokens() const;
    std::vector<double> noun_tokens() const;

    friend bool operator==(const PairCounts&, const PairCounts&) = default;

private:
    std::size_t num_verbs_ = 0;
    std::size_t num_nouns_ = 0;
    std::vector<PairEntry> entries_;
    double total_tokens_ = 0.0;
};

/// Translates counts indexed against `from` into indices of `to`. Pairs with a
/// symbol missing from `to` are skipped and their token mass returned.
std::pair<PairCounts, double> remap_counts(const PairCounts& counts, const Vocabulary& from, const Vocabulary& to);

}  // namespace lcm
