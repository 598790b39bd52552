#pragma once

#include "lcm/model.hpp"
#include "lcm/pair_counts.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lcm {

/// (v, n) was cut from the corpus; (v', n) is unseen in train and test.
struct EvalTriple {
    SymbolIndex verb = 0;
    SymbolIndex noun = 0;
    SymbolIndex verb_prime = 0;

    friend bool operator==(const EvalTriple&, const EvalTriple&) = default;
};

struct EvalSplit {
    PairCounts train_counts;
    /// Cut pair types with their full frequency, sorted by (verb, noun).
    std::vector<PairEntry> test_pairs;
    std::vector<EvalTriple> triples;

    /// Test pairs for which no admissible distractor was found.
    std::size_t dropped_no_distractor = 0;
    /// Triples removed by the frequency filter.
    std::size_t filtered_by_frequency = 0;
    /// Candidate pair types rejected because cutting them would remove a
    /// verb or noun from the training corpus.
    std::size_t rejected_candidates = 0;
};

struct PseudoCorpusOptions {
    std::size_t test_pair_count = 3000;
    double freq_min = 30;
    double freq_max = 3000;
    std::uint64_t seed = 0;
    std::size_t max_distractor_attempts = 1000;
};

/// Cuts `test_pair_count` pair types out of `data` and pairs each cut noun
/// with a distractor verb. The procedure, in terms of one Rng(seed) stream:
///
///  1. Candidates are drawn without replacement from the type list (sorted by
///     (verb, noun)): j = index(pool size), take pool[j], move the last pool
///     element into slot j. A candidate is accepted only if its verb and noun
///     each keep at least one other type in training; otherwise it is
///     rejected for good. Stops at test_pair_count accepted or an empty pool.
///  2. For each cut pair in (verb, noun) order, v' is drawn proportionally to
///     training token frequency (u = uniform() * total, first verb whose
///     cumulative frequency exceeds u), rejecting v' = v and any (v', n)
///     present in the original corpus, up to max_distractor_attempts draws.
///  3. Triples keep only v, v', n whose original-corpus token frequency lies
///     in [freq_min, freq_max].
///
/// Throws EmptyEvaluationError when no triple survives.
EvalSplit build_pseudo_corpus(const PairCounts& data, const PseudoCorpusOptions& options);

/// Fraction of triples with p(n|v) >= p(n|v'); ties count as correct.
/// Throws EmptyEvaluationError on an empty list.
double pseudo_accuracy(const LCModel& model, std::span<const EvalTriple> triples);

/// Fraction of `sample_size` uniform draws from V x N (v = index(|V|) then
/// n = index(|N|) per draw) with p(v, n) > positivity_threshold.
double smoothing_power(const LCModel& model, std::size_t sample_size, std::uint64_t seed,
                       double positivity_threshold = 0.0);

/// Observed types / |V x N|: the smoothing power of the raw counts.
double type_coverage_baseline(const PairCounts& data, const Vocabulary& vocabulary);

// TSV persistence --------------------------------------------------------

/// `verb<TAB>noun<TAB>count` per entry.
std::string pairs_to_tsv(std::span<const PairEntry> entries, const Vocabulary& vocabulary);
/// `verb<TAB>noun<TAB>verb_prime` per triple.
std::string triples_to_tsv(std::span<const EvalTriple> triples, const Vocabulary& vocabulary);

/// Resolves triple symbols against `vocabulary`; rows naming unknown symbols
/// are skipped and counted in `skipped` when given.
std::vector<EvalTriple> parse_triples(std::string_view text, const Vocabulary& vocabulary,
                                      std::size_t* skipped = nullptr);

/// Writes `<prefix>.train.tsv`, `<prefix>.test.tsv`, `<prefix>.triples.tsv`.
void write_split(const std::string& prefix, const EvalSplit& split, const Vocabulary& vocabulary);

/// One `num_classes<TAB>iterations<TAB>seed<TAB>metric<TAB>value` row.
struct MetricRow {
    std::size_t num_classes = 0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
};

}  // namespace lcm
