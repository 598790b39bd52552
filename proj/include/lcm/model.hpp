#pragma once

#include "lcm/pair_counts.hpp"
#include "lcm/vocabulary.hpp"

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lcm {

/// Tolerance on |sum - 1| for every distribution in a model.
inline constexpr double kNormTolerance = 1e-10;

/// Latent-class model p(c, v, n) = p(c) p(v|c) p(n|c).
///
/// Parameters are dense and stored symbol-major: row v of the verb table holds
/// p(v|c) for every class, so the per-pair class loop reads contiguous memory.
/// Immutable after construction; safe to share across threads.
class LCModel {
public:
    /// Validates shapes, non-negativity and normalization (kNormTolerance).
    /// `verb_table` is |V| x |C| and `noun_table` |N| x |C|, row-major.
    LCModel(std::shared_ptr<const Vocabulary> vocabulary, std::size_t num_classes, std::vector<double> class_prior,
            std::vector<double> verb_table, std::vector<double> noun_table);

    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t num_verbs() const noexcept { return vocabulary_->verbs.size(); }
    std::size_t num_nouns() const noexcept { return vocabulary_->nouns.size(); }

    const Vocabulary& vocabulary() const noexcept { return *vocabulary_; }
    const std::shared_ptr<const Vocabulary>& shared_vocabulary() const noexcept { return vocabulary_; }

    std::span<const double> class_prior() const noexcept { return class_prior_; }
    /// p(v|c) for c = 0..|C|-1.
    std::span<const double> verb_row(SymbolIndex verb) const;
    /// p(n|c) for c = 0..|C|-1.
    std::span<const double> noun_row(SymbolIndex noun) const;
    std::span<const double> verb_table() const noexcept { return verb_table_; }
    std::span<const double> noun_table() const noexcept { return noun_table_; }

    double verb_given_class(std::size_t c, SymbolIndex verb) const { return verb_row(verb)[c]; }
    double noun_given_class(std::size_t c, SymbolIndex noun) const { return noun_row(noun)[c]; }

    /// Parameter-wise equality (vocabulary compared by value).
    bool same_parameters(const LCModel& other) const;

private:
    std::shared_ptr<const Vocabulary> vocabulary_;
    std::size_t num_classes_;
    std::vector<double> class_prior_;
    std::vector<double> verb_table_;
    std::vector<double> noun_table_;
};

/// p(v, n) = sum_c p(c) p(v|c) p(n|c).
double joint_prob(const LCModel& model, SymbolIndex verb, SymbolIndex noun);

/// p(c | v, n); throws UndefinedPosteriorError when p(v, n) = 0.
std::vector<double> class_posterior(const LCModel& model, SymbolIndex verb, SymbolIndex noun);

/// p(v) = sum_c p(c) p(v|c).
double verb_marginal(const LCModel& model, SymbolIndex verb);

/// p(n | v) = p(v, n) / p(v), evaluated as sum_c p(c|v) p(n|c).
/// Throws UndefinedConditionalError when p(v) = 0.
double cond_noun_given_verb(const LCModel& model, SymbolIndex verb, SymbolIndex noun);

/// L = sum_y f(y) ln p(y) over the sample. Throws ZeroLikelihoodError naming
/// the first observed pair with p(y) = 0.
double log_likelihood(const LCModel& model, const PairCounts& data);

/// Versioned line-oriented text format (`LCMODEL 1 <C> <V> <N>` header).
std::string serialize_model(const LCModel& model);
void write_model(std::ostream& out, const LCModel& model);

/// Throws ParseError carrying the offending line number.
LCModel deserialize_model(std::string_view text);
LCModel read_model(std::istream& in);

}  // namespace lcm
