#include "lcm/corpus_io.hpp"

#include "lcm/errors.hpp"
#include "lcm/rng.hpp"
#include "lcm/text_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace lcm {
namespace {

bool skip_line(std::string_view line) { return line.empty() || line.front() == '#'; }

double count_field(const std::vector<std::string_view>& fields, std::size_t index, std::size_t line_no) {
    if (fields.size() <= index) return 1.0;
    double count = 0.0;
    if (!parse_real(fields[index], count) || !std::isfinite(count)) {
        throw ParseError("count '" + std::string(fields[index]) + "' is not a number", line_no);
    }
    if (!(count > 0.0)) throw ParseError("count must be positive", line_no);
    return count;
}

// Groups rows by verb in first-appearance order.
template <typename Sample>
class SampleGrouper {
public:
    Sample& get(std::string_view verb) {
        auto it = index_.find(std::string(verb));
        if (it != index_.end()) return samples_[it->second];
        index_.emplace(std::string(verb), samples_.size());
        samples_.emplace_back();
        samples_.back().verb = std::string(verb);
        return samples_.back();
    }
    std::vector<Sample> take() { return std::move(samples_); }

private:
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<Sample> samples_;
};

void add_unresolved(std::vector<std::pair<std::string, double>>& unresolved, std::string name, double count) {
    for (auto& [n, c] : unresolved) {
        if (n == name) {
            c += count;
            return;
        }
    }
    unresolved.emplace_back(std::move(name), count);
}

std::size_t draw(Rng& rng, const std::vector<double>& cumulative) {
    const double u = rng.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
}

std::vector<double> cumulative_of(const std::vector<double>& dist) {
    std::vector<double> out(dist.size());
    double running = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        running += dist[i];
        out[i] = running;
    }
    return out;
}

void check_distribution(const std::vector<double>& dist, const char* what) {
    double sum = 0.0;
    for (double p : dist) {
        if (!(p >= 0.0)) throw ValidationError(std::string(what) + " has a negative entry");
        sum += p;
    }
    if (!(std::abs(sum - 1.0) <= kNormTolerance)) throw ValidationError(std::string(what) + " is not normalized");
}

}  // namespace

PairCorpus read_pairs(std::string_view text) {
    auto vocab = std::make_shared<Vocabulary>();
    std::vector<PairEntry> entries;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (skip_line(line)) return;
        auto fields = split(line, '\t');
        if (fields.size() < 2 || fields.size() > 3) {
            throw ParseError("expected verb_functor<TAB>noun[<TAB>count]", line_no);
        }
        try {
            VerbFunctor::parse(fields[0]);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line_no);
        }
        if (fields[1].empty()) throw ParseError("empty noun", line_no);
        const double count = count_field(fields, 2, line_no);
        entries.push_back({vocab->verbs.intern(fields[0]), vocab->nouns.intern(fields[1]), count});
    });
    PairCounts counts(vocab->verbs.size(), vocab->nouns.size(), std::move(entries));
    return PairCorpus{std::move(vocab), std::move(counts)};
}

PairCorpus read_pairs(std::istream& in) { return read_pairs(read_stream(in)); }

std::string write_pairs(const Vocabulary& vocabulary, const PairCounts& counts) {
    std::string out;
    for (const auto& e : counts.entries()) {
        out += vocabulary.verbs.at(e.verb) + '\t' + vocabulary.nouns.at(e.noun) + '\t' + format_real(e.count) + '\n';
    }
    return out;
}

std::vector<NounSample> read_noun_samples(std::string_view text, const SymbolTable& nouns) {
    SampleGrouper<NounSample> groups;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (skip_line(line)) return;
        auto fields = split(line, '\t');
        if (fields.size() < 2 || fields.size() > 3) throw ParseError("expected verb<TAB>noun[<TAB>count]", line_no);
        if (fields[0].empty() || fields[1].empty()) throw ParseError("empty field", line_no);
        const double count = count_field(fields, 2, line_no);
        auto& sample = groups.get(fields[0]);
        if (auto n = nouns.find(fields[1])) {
            sample.counts.push_back({*n, count});
        } else {
            add_unresolved(sample.unresolved, std::string(fields[1]), count);
        }
    });
    auto samples = groups.take();
    for (auto& s : samples) {
        std::map<SymbolIndex, double> merged;
        for (const auto& nc : s.counts) merged[nc.noun] += nc.count;
        s.counts.clear();
        for (auto [noun, count] : merged) s.counts.push_back({noun, count});
    }
    return samples;
}

std::vector<NounSample> read_noun_samples(std::istream& in, const SymbolTable& nouns) {
    return read_noun_samples(read_stream(in), nouns);
}

std::vector<NounPairSample> read_pair_samples(std::string_view text, const SymbolTable& nouns) {
    SampleGrouper<NounPairSample> groups;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (skip_line(line)) return;
        auto fields = split(line, '\t');
        if (fields.size() < 3 || fields.size() > 4) {
            throw ParseError("expected verb<TAB>subject<TAB>object[<TAB>count]", line_no);
        }
        if (fields[0].empty() || fields[1].empty() || fields[2].empty()) throw ParseError("empty field", line_no);
        const double count = count_field(fields, 3, line_no);
        auto& sample = groups.get(fields[0]);
        auto subj = nouns.find(fields[1]);
        auto obj = nouns.find(fields[2]);
        if (subj && obj) {
            sample.counts.push_back({*subj, *obj, count});
        } else {
            add_unresolved(sample.unresolved, std::string(fields[1]) + " - " + std::string(fields[2]), count);
        }
    });
    auto samples = groups.take();
    for (auto& s : samples) {
        std::map<std::pair<SymbolIndex, SymbolIndex>, double> merged;
        for (const auto& pc : s.counts) merged[{pc.subject, pc.object}] += pc.count;
        s.counts.clear();
        for (auto [key, count] : merged) s.counts.push_back({key.first, key.second, count});
    }
    return samples;
}

std::vector<NounPairSample> read_pair_samples(std::istream& in, const SymbolTable& nouns) {
    return read_pair_samples(read_stream(in), nouns);
}

void PlantedModelSpec::validate() const {
    if (class_weights.empty()) throw ValidationError("planted spec has no classes");
    if (verb_dists.size() != class_weights.size() || noun_dists.size() != class_weights.size()) {
        throw ValidationError("planted spec needs one verb and one noun distribution per class");
    }
    if (token_count == 0) throw ValidationError("token_count must be at least 1");
    check_distribution(class_weights, "class weights");
    for (std::size_t c = 0; c < class_weights.size(); ++c) {
        if (verb_dists[c].size() != num_verbs() || noun_dists[c].size() != num_nouns() || num_verbs() == 0 ||
            num_nouns() == 0) {
            throw ValidationError("planted distributions have inconsistent sizes");
        }
        check_distribution(verb_dists[c], "verb distribution");
        check_distribution(noun_dists[c], "noun distribution");
    }
}

PlantedModelSpec make_block_spec(std::size_t num_classes, std::size_t verbs_per_class, std::size_t nouns_per_class,
                                 double noise, std::size_t token_count, std::uint64_t seed) {
    if (num_classes == 0 || verbs_per_class == 0 || nouns_per_class == 0) {
        throw ValidationError("block spec needs positive class, verb and noun counts");
    }
    if (!(noise >= 0.0 && noise < 1.0)) throw ValidationError("noise must lie in [0, 1)");
    if (num_classes == 1) noise = 0.0;
    auto block = [&](std::size_t per_class, std::size_t c) {
        const std::size_t total = per_class * num_classes;
        std::vector<double> dist(total, noise / static_cast<double>(total - per_class));
        for (std::size_t i = c * per_class; i < (c + 1) * per_class; ++i) {
            dist[i] = (1.0 - noise) / static_cast<double>(per_class);
        }
        return dist;
    };
    PlantedModelSpec spec;
    spec.class_weights.assign(num_classes, 1.0 / static_cast<double>(num_classes));
    for (std::size_t c = 0; c < num_classes; ++c) {
        spec.verb_dists.push_back(block(verbs_per_class, c));
        spec.noun_dists.push_back(block(nouns_per_class, c));
    }
    spec.token_count = token_count;
    spec.seed = seed;
    return spec;
}

PlantedCorpus generate_planted(const PlantedModelSpec& spec) {
    spec.validate();
    const std::size_t k = spec.num_classes();
    const std::size_t nv = spec.num_verbs();
    const std::size_t nn = spec.num_nouns();

    auto vocab = std::make_shared<Vocabulary>();
    for (std::size_t v = 0; v < nv; ++v) vocab->verbs.add_new("verb" + std::to_string(v) + ".as:s");
    for (std::size_t n = 0; n < nn; ++n) vocab->nouns.add_new("noun" + std::to_string(n));

    const auto class_cum = cumulative_of(spec.class_weights);
    std::vector<std::vector<double>> verb_cum, noun_cum;
    for (std::size_t c = 0; c < k; ++c) {
        verb_cum.push_back(cumulative_of(spec.verb_dists[c]));
        noun_cum.push_back(cumulative_of(spec.noun_dists[c]));
    }

    Rng rng(spec.seed);
    std::vector<PairEntry> entries;
    entries.reserve(spec.token_count);
    for (std::size_t t = 0; t < spec.token_count; ++t) {
        const std::size_t c = draw(rng, class_cum);
        const auto v = static_cast<SymbolIndex>(draw(rng, verb_cum[c]));
        const auto n = static_cast<SymbolIndex>(draw(rng, noun_cum[c]));
        entries.push_back({v, n, 1.0});
    }
    PairCounts counts(nv, nn, std::move(entries));

    std::vector<double> verb_table(nv * k), noun_table(nn * k);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t v = 0; v < nv; ++v) verb_table[v * k + c] = spec.verb_dists[c][v];
        for (std::size_t n = 0; n < nn; ++n) noun_table[n * k + c] = spec.noun_dists[c][n];
    }
    LCModel truth(vocab, k, spec.class_weights, std::move(verb_table), std::move(noun_table));
    return PlantedCorpus{std::move(vocab), std::move(counts), std::move(truth)};
}

PlantedSubjects generate_planted_subjects(const PlantedModelSpec& spec, std::size_t verbs_per_class,
                                          std::size_t tokens_per_verb, std::uint64_t seed) {
    spec.validate();
    if (verbs_per_class == 0 || tokens_per_verb == 0) throw ValidationError("empty planted subject request");
    Rng rng(seed);
    PlantedSubjects out;
    for (std::size_t c = 0; c < spec.num_classes(); ++c) {
        const auto cum = cumulative_of(spec.noun_dists[c]);
        for (std::size_t i = 0; i < verbs_per_class; ++i) {
            std::map<SymbolIndex, double> counts;
            for (std::size_t t = 0; t < tokens_per_verb; ++t) counts[static_cast<SymbolIndex>(draw(rng, cum))] += 1.0;
            NounSample sample;
            sample.verb = "new" + std::to_string(c) + "_" + std::to_string(i);
            for (auto [n, f] : counts) sample.counts.push_back({n, f});
            out.samples.push_back(std::move(sample));
            out.classes.push_back(c);
        }
    }
    return out;
}

std::string noun_samples_to_tsv(const std::vector<NounSample>& samples, const SymbolTable& nouns) {
    std::string out;
    for (const auto& s : samples) {
        for (const auto& nc : s.counts) out += s.verb + '\t' + nouns.at(nc.noun) + '\t' + format_real(nc.count) + '\n';
        for (const auto& [name, count] : s.unresolved) out += s.verb + '\t' + name + '\t' + format_real(count) + '\n';
    }
    return out;
}

}  // namespace lcm
