#include "lcm/evaluation.hpp"

#include "lcm/errors.hpp"
#include "lcm/rng.hpp"
#include "lcm/text_util.hpp"

#include <algorithm>

namespace lcm {

EvalSplit build_pseudo_corpus(const PairCounts& data, const PseudoCorpusOptions& options) {
    if (options.freq_min > options.freq_max) throw ValidationError("freq_min exceeds freq_max");
    if (options.test_pair_count == 0) throw ValidationError("test_pair_count must be positive");
    if (data.type_count() < options.test_pair_count) {
        throw ValidationError("data has " + std::to_string(data.type_count()) + " pair types, fewer than " +
                              std::to_string(options.test_pair_count) + " requested test pairs");
    }
    const auto entries = data.entries();
    Rng rng(options.seed);
    EvalSplit split;

    // 1. cut test pair types
    std::vector<std::size_t> verb_types(data.num_verbs(), 0);
    std::vector<std::size_t> noun_types(data.num_nouns(), 0);
    for (const auto& e : entries) {
        ++verb_types[e.verb];
        ++noun_types[e.noun];
    }
    std::vector<std::size_t> pool(entries.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    std::vector<bool> cut(entries.size(), false);
    std::size_t accepted = 0;
    while (accepted < options.test_pair_count && !pool.empty()) {
        const std::size_t j = rng.index(pool.size());
        const std::size_t candidate = pool[j];
        pool[j] = pool.back();
        pool.pop_back();
        const auto& e = entries[candidate];
        if (verb_types[e.verb] < 2 || noun_types[e.noun] < 2) {
            ++split.rejected_candidates;
            continue;
        }
        --verb_types[e.verb];
        --noun_types[e.noun];
        cut[candidate] = true;
        ++accepted;
    }

    std::vector<PairEntry> train;
    train.reserve(entries.size() - accepted);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        (cut[i] ? split.test_pairs : train).push_back(entries[i]);
    }
    split.train_counts = PairCounts(data.num_verbs(), data.num_nouns(), std::move(train));

    // 2. distractors
    const auto train_verb_tokens = split.train_counts.verb_tokens();
    std::vector<double> cumulative(train_verb_tokens.size());
    double running = 0.0;
    for (std::size_t v = 0; v < cumulative.size(); ++v) {
        running += train_verb_tokens[v];
        cumulative[v] = running;
    }
    const double train_total = running;

    std::vector<EvalTriple> candidates;
    for (const auto& pair : split.test_pairs) {
        bool found = false;
        for (std::size_t attempt = 0; attempt < options.max_distractor_attempts && train_total > 0.0; ++attempt) {
            const double u = rng.uniform() * train_total;
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            if (it == cumulative.end()) --it;
            const auto v_prime = static_cast<SymbolIndex>(it - cumulative.begin());
            if (v_prime == pair.verb || data.contains(v_prime, pair.noun)) continue;
            candidates.push_back({pair.verb, pair.noun, v_prime});
            found = true;
            break;
        }
        if (!found) ++split.dropped_no_distractor;
    }

    // 3. frequency filter on the original corpus
    const auto verb_tokens = data.verb_tokens();
    const auto noun_tokens = data.noun_tokens();
    auto in_band = [&](double f) { return f >= options.freq_min && f <= options.freq_max; };
    for (const auto& t : candidates) {
        if (in_band(verb_tokens[t.verb]) && in_band(verb_tokens[t.verb_prime]) && in_band(noun_tokens[t.noun])) {
            split.triples.push_back(t);
        } else {
            ++split.filtered_by_frequency;
        }
    }
    if (split.triples.empty()) {
        throw EmptyEvaluationError("no evaluation triples survived (" + std::to_string(split.dropped_no_distractor) +
                                   " without distractor, " + std::to_string(split.filtered_by_frequency) +
                                   " filtered by frequency)");
    }
    return split;
}

double pseudo_accuracy(const LCModel& model, std::span<const EvalTriple> triples) {
    if (triples.empty()) throw EmptyEvaluationError("accuracy over zero triples is undefined");
    std::size_t correct = 0;
    for (const auto& t : triples) {
        if (cond_noun_given_verb(model, t.verb, t.noun) >= cond_noun_given_verb(model, t.verb_prime, t.noun)) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(triples.size());
}

double smoothing_power(const LCModel& model, std::size_t sample_size, std::uint64_t seed,
                       double positivity_threshold) {
    if (sample_size == 0) throw ValidationError("sample_size must be positive");
    if (!(positivity_threshold >= 0.0)) throw ValidationError("positivity threshold must be non-negative");
    Rng rng(seed);
    std::size_t positive = 0;
    for (std::size_t i = 0; i < sample_size; ++i) {
        const auto v = static_cast<SymbolIndex>(rng.index(model.num_verbs()));
        const auto n = static_cast<SymbolIndex>(rng.index(model.num_nouns()));
        if (joint_prob(model, v, n) > positivity_threshold) ++positive;
    }
    return static_cast<double>(positive) / static_cast<double>(sample_size);
}

double type_coverage_baseline(const PairCounts& data, const Vocabulary& vocabulary) {
    if (vocabulary.verbs.empty() || vocabulary.nouns.empty()) throw ValidationError("empty vocabulary");
    return static_cast<double>(data.type_count()) /
           (static_cast<double>(vocabulary.verbs.size()) * static_cast<double>(vocabulary.nouns.size()));
}

std::string pairs_to_tsv(std::span<const PairEntry> entries, const Vocabulary& vocabulary) {
    std::string out;
    for (const auto& e : entries) {
        out += vocabulary.verbs.at(e.verb) + '\t' + vocabulary.nouns.at(e.noun) + '\t' + format_real(e.count) + '\n';
    }
    return out;
}

std::string triples_to_tsv(std::span<const EvalTriple> triples, const Vocabulary& vocabulary) {
    std::string out;
    for (const auto& t : triples) {
        out += vocabulary.verbs.at(t.verb) + '\t' + vocabulary.nouns.at(t.noun) + '\t' +
               vocabulary.verbs.at(t.verb_prime) + '\n';
    }
    return out;
}

std::vector<EvalTriple> parse_triples(std::string_view text, const Vocabulary& vocabulary, std::size_t* skipped) {
    std::vector<EvalTriple> out;
    std::size_t missing = 0;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (line.empty() || line.front() == '#') return;
        auto fields = split(line, '\t');
        if (fields.size() != 3) throw ParseError("expected verb<TAB>noun<TAB>verb_prime", line_no);
        auto v = vocabulary.verbs.find(fields[0]);
        auto n = vocabulary.nouns.find(fields[1]);
        auto vp = vocabulary.verbs.find(fields[2]);
        if (!v || !n || !vp) {
            ++missing;
            return;
        }
        out.push_back({*v, *n, *vp});
    });
    if (skipped) *skipped = missing;
    return out;
}

void write_split(const std::string& prefix, const EvalSplit& split, const Vocabulary& vocabulary) {
    write_file_atomic(prefix + ".train.tsv", pairs_to_tsv(split.train_counts.entries(), vocabulary));
    write_file_atomic(prefix + ".test.tsv", pairs_to_tsv(split.test_pairs, vocabulary));
    write_file_atomic(prefix + ".triples.tsv", triples_to_tsv(split.triples, vocabulary));
}

}  // namespace lcm
