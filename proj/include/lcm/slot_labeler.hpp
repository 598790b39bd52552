#pragma once

#include "lcm/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lcm {

/// Read-only p(n|c) table, |N| x |C| row-major. Slot labeling only ever sees
/// this view, never the verb side of a model, so it works for verbs the
/// clustering model has not seen.
class NounLikelihoodView {
public:
    NounLikelihoodView(std::size_t num_classes, std::span<const double> table);
    explicit NounLikelihoodView(const LCModel& model) : NounLikelihoodView(model.num_classes(), model.noun_table()) {}

    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t num_nouns() const noexcept { return table_.size() / num_classes_; }
    std::span<const double> row(SymbolIndex noun) const;

private:
    std::size_t num_classes_;
    std::span<const double> table_;
};

struct NounCount {
    SymbolIndex noun = 0;
    double count = 0.0;
};

struct NounPairCount {
    SymbolIndex subject = 0;
    SymbolIndex object = 0;
    double count = 0.0;
};

/// Subjects observed with one intransitive verb.
struct NounSample {
    std::string verb;
    /// Sorted by noun index, unique, counts > 0.
    std::vector<NounCount> counts;
    /// Nouns missing from the model vocabulary, with their frequency.
    std::vector<std::pair<std::string, double>> unresolved;
};

/// (subject, object) pairs observed with one transitive verb.
struct NounPairSample {
    std::string verb;
    /// Sorted by (subject, object), unique, counts > 0.
    std::vector<NounPairCount> counts;
    std::vector<std::pair<std::string, double>> unresolved;
};

enum class SlotKind { intransitive, transitive };
enum class LabelInit { uniform, random };

struct LabelOptions {
    std::size_t iterations = 50;
    LabelInit init = LabelInit::uniform;
    /// Only consulted for LabelInit::random.
    std::uint64_t seed = 0;
};

struct SlotLabeling {
    SlotKind kind = SlotKind::intransitive;
    std::size_t num_classes = 0;
    /// p(c), or p(c1, c2) at index c1 * num_classes + c2.
    std::vector<double> weights;
    /// Sample log-likelihood before the first and after every step.
    std::vector<double> trace;
    /// Token mass excluded: unresolved nouns plus nouns with p(n|c) = 0 for
    /// every class.
    double dropped_mass = 0.0;
    double used_mass = 0.0;

    double weight(std::size_t c) const { return weights.at(c); }
    double weight(std::size_t c1, std::size_t c2) const { return weights.at(c1 * num_classes + c2); }
};

/// EM over p(c) for a fixed p(n|c): p(c|n) = p(c) p(n|c) / sum_c' p(c') p(n|c'),
/// p'(c) = sum_n f(n) p(c|n) / sum_n f(n). Throws EmptySampleError when no
/// sample noun has positive probability under some class.
SlotLabeling label_intransitive(const NounLikelihoodView& nouns, const NounSample& sample,
                                const LabelOptions& options = {});
SlotLabeling label_intransitive(const LCModel& model, const NounSample& sample, const LabelOptions& options = {});

/// EM over the full |C| x |C| matrix p(c1, c2) with
/// p(n1, n2) = sum_{c1,c2} p(c1, c2) p(n1|c1) p(n2|c2).
SlotLabeling label_transitive(const NounLikelihoodView& nouns, const NounPairSample& sample,
                              const LabelOptions& options = {});
SlotLabeling label_transitive(const LCModel& model, const NounPairSample& sample, const LabelOptions& options = {});

struct Filler {
    SymbolIndex noun = 0;
    /// Object noun for transitive entries.
    std::optional<SymbolIndex> object;
    /// f(n) p(c*|n), resp. f(n1, n2) p(c1*, c2*|n1, n2).
    double score = 0.0;
};

struct LexiconEntry {
    std::string verb;
    SlotKind kind = SlotKind::intransitive;
    std::size_t best_class = 0;
    /// Object-slot class for transitive entries.
    std::optional<std::size_t> best_object_class;
    double best_prob = 0.0;
    /// Descending score; ties by ascending noun index (pair order).
    std::vector<Filler> top_fillers;

    /// `as:s` or `aso:s+o`.
    std::string slot_signature() const;
    /// `17` or `(8,17)`.
    std::string label() const;
};

LexiconEntry make_entry(const NounLikelihoodView& nouns, const SlotLabeling& labeling, const NounSample& sample,
                        std::size_t top_k);
LexiconEntry make_entry(const NounLikelihoodView& nouns, const SlotLabeling& labeling, const NounPairSample& sample,
                        std::size_t top_k);

struct LabeledVerb {
    std::string verb;
    std::optional<SlotLabeling> labeling;
    std::optional<LexiconEntry> entry;
    /// Non-empty when labeling this verb failed.
    std::string error;
};

/// Labels every sample independently and sorts by best_prob descending
/// (stable on input order). Failed verbs follow, in input order.
std::vector<LabeledVerb> label_many(const LCModel& model, std::span<const NounSample> samples,
                                    const LabelOptions& options = {}, std::size_t top_k = 10,
                                    std::size_t threads = 1);
std::vector<LabeledVerb> label_many(const LCModel& model, std::span<const NounPairSample> samples,
                                    const LabelOptions& options = {}, std::size_t top_k = 10,
                                    std::size_t threads = 1);

/// `verb<TAB>slot_signature<TAB>label<TAB>prob<TAB>filler:score;...`
std::string lexicon_tsv_row(const LexiconEntry& entry, const Vocabulary& vocabulary);

/// Two-column block: `verb label prob` header followed by one
/// `filler score` line per filler.
std::string lexicon_report(const LexiconEntry& entry, const Vocabulary& vocabulary);

}  // namespace lcm
