#pragma once

#include "lcm/model.hpp"
#include "lcm/pair_counts.hpp"
#include "lcm/slot_labeler.hpp"
#include "lcm/vocabulary.hpp"

#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace lcm {

struct PairCorpus {
    std::shared_ptr<Vocabulary> vocabulary;
    PairCounts counts;
};

/// Parses `verb_functor<TAB>noun[<TAB>count]` lines (`#` comments and blank
/// lines ignored). Duplicate pairs are summed; indices follow first
/// appearance. Throws ParseError with the line number on malformed lines,
/// non-positive counts or unparseable verb functors.
PairCorpus read_pairs(std::string_view text);
PairCorpus read_pairs(std::istream& in);

/// Writes counts in (verb, noun) index order with 17-digit counts, so that
/// read_pairs(write_pairs(...)) reproduces the same corpus.
std::string write_pairs(const Vocabulary& vocabulary, const PairCounts& counts);

/// `verb<TAB>noun[<TAB>count]`, grouped by verb in first-appearance order.
/// Nouns are resolved against `nouns`; unknown ones land in `unresolved`.
std::vector<NounSample> read_noun_samples(std::string_view text, const SymbolTable& nouns);
std::vector<NounSample> read_noun_samples(std::istream& in, const SymbolTable& nouns);

/// `verb<TAB>subject<TAB>object[<TAB>count]`, grouped like read_noun_samples.
std::vector<NounPairSample> read_pair_samples(std::string_view text, const SymbolTable& nouns);
std::vector<NounPairSample> read_pair_samples(std::istream& in, const SymbolTable& nouns);

/// Ground truth for synthetic corpora.
struct PlantedModelSpec {
    std::vector<double> class_weights;
    /// One distribution over verbs per class.
    std::vector<std::vector<double>> verb_dists;
    /// One distribution over nouns per class.
    std::vector<std::vector<double>> noun_dists;
    std::size_t token_count = 1;
    std::uint64_t seed = 0;

    std::size_t num_classes() const { return class_weights.size(); }
    std::size_t num_verbs() const { return verb_dists.empty() ? 0 : verb_dists.front().size(); }
    std::size_t num_nouns() const { return noun_dists.empty() ? 0 : noun_dists.front().size(); }

    /// Throws ValidationError unless every distribution is normalized
    /// (kNormTolerance) and token_count >= 1.
    void validate() const;
};

/// Block-structured spec: class k owns verbs [k*vpc, (k+1)*vpc) and nouns
/// [k*npc, (k+1)*npc), each getting (1 - noise) of its class's mass evenly;
/// `noise` is spread evenly over all other symbols. Uniform class weights.
PlantedModelSpec make_block_spec(std::size_t num_classes, std::size_t verbs_per_class, std::size_t nouns_per_class,
                                 double noise, std::size_t token_count, std::uint64_t seed);

struct PlantedCorpus {
    std::shared_ptr<Vocabulary> vocabulary;
    PairCounts counts;
    LCModel truth;
};

/// Draws token_count i.i.d. (c, v, n) triples with Rng(seed) (class, then
/// verb, then noun per token, each by inverse-CDF on one uniform()), drops c
/// and aggregates. Symbols are named `verb<i>.as:s` and `noun<j>`.
PlantedCorpus generate_planted(const PlantedModelSpec& spec);

struct PlantedSubjects {
    std::vector<NounSample> samples;
    /// Generating class of each sample.
    std::vector<std::size_t> classes;
};

/// Subject samples for `verbs_per_class` fresh intransitive verbs per class
/// (`new<k>_<i>`), each with `tokens_per_verb` nouns drawn from that class's
/// noun distribution.
PlantedSubjects generate_planted_subjects(const PlantedModelSpec& spec, std::size_t verbs_per_class,
                                          std::size_t tokens_per_verb, std::uint64_t seed);

/// `verb<TAB>noun<TAB>count` lines for samples (resolved and unresolved).
std::string noun_samples_to_tsv(const std::vector<NounSample>& samples, const SymbolTable& nouns);

}  // namespace lcm
