#include "lcm/slot_labeler.hpp"

#include "lcm/errors.hpp"
#include "lcm/rng.hpp"
#include "lcm/simd/kernels.hpp"
#include "lcm/text_util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace lcm {
namespace {

std::vector<double> initial_weights(std::size_t cells, const LabelOptions& options) {
    std::vector<double> w(cells, 1.0 / static_cast<double>(cells));
    if (options.init == LabelInit::random) {
        Rng rng(options.seed);
        for (double& x : w) x = rng.uniform(0.1, 1.0);
        const double sum = simd::ordered_sum(w);
        for (double& x : w) x /= sum;
    }
    return w;
}

double unresolved_mass(const std::vector<std::pair<std::string, double>>& unresolved) {
    double mass = 0.0;
    for (const auto& [noun, count] : unresolved) mass += count;
    return mass;
}

std::size_t argmax(std::span<const double> xs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] > xs[best]) best = i;
    }
    return best;
}

void check_iterations(const LabelOptions& options) {
    if (options.iterations == 0) throw ValidationError("labeling needs at least one iteration");
}

// Mixture-weight EM shared by both slot kinds. `fill_terms(obs, weights, out)`
// writes the per-cell joint terms of one observation into `out`.
template <typename Obs, typename FillTerms>
void run_weight_em(std::vector<double>& weights, std::span<const Obs> observations, std::size_t iterations,
                   std::vector<double>& trace, FillTerms fill_terms) {
    const std::size_t cells = weights.size();
    const auto& kern = simd::kernels();
    std::vector<double> terms(cells);
    std::vector<double> acc(cells);
    auto pass = [&](bool accumulate) {
        double ll = 0.0;
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const auto& obs : observations) {
            fill_terms(obs, weights, terms.data());
            const double p = simd::ordered_sum(terms);
            if (!(p > 0.0)) throw TrainingDegeneracyError("sample observation has zero probability");
            ll += obs.count * std::log(p);
            if (accumulate) kern.accumulate(acc.data(), terms.data(), obs.count / p, cells);
        }
        return ll;
    };
    for (std::size_t t = 0; t < iterations; ++t) {
        trace.push_back(pass(true));
        // sum_c acc[c] equals sum_n f(n); normalizing by it keeps the weights exactly on the simplex.
        const double total = simd::ordered_sum(acc);
        for (std::size_t i = 0; i < cells; ++i) weights[i] = acc[i] / total;
    }
    trace.push_back(pass(false));
}

}  // namespace

NounLikelihoodView::NounLikelihoodView(std::size_t num_classes, std::span<const double> table)
    : num_classes_(num_classes), table_(table) {
    if (num_classes_ == 0 || table_.size() % num_classes_ != 0) {
        throw ValidationError("noun likelihood table shape does not match class count");
    }
}

std::span<const double> NounLikelihoodView::row(SymbolIndex noun) const {
    if (noun >= num_nouns()) throw IndexError("noun index " + std::to_string(noun) + " out of range");
    return table_.subspan(std::size_t{noun} * num_classes_, num_classes_);
}

SlotLabeling label_intransitive(const NounLikelihoodView& nouns, const NounSample& sample,
                                const LabelOptions& options) {
    check_iterations(options);
    const std::size_t k = nouns.num_classes();
    SlotLabeling out;
    out.kind = SlotKind::intransitive;
    out.num_classes = k;
    out.dropped_mass = unresolved_mass(sample.unresolved);

    std::vector<NounCount> usable;
    for (const auto& nc : sample.counts) {
        if (simd::ordered_sum(nouns.row(nc.noun)) > 0.0) {
            usable.push_back(nc);
            out.used_mass += nc.count;
        } else {
            out.dropped_mass += nc.count;
        }
    }
    if (usable.empty()) throw EmptySampleError("no usable subject nouns for verb " + sample.verb);

    out.weights = initial_weights(k, options);
    const auto& kern = simd::kernels();
    run_weight_em<NounCount>(out.weights, usable, options.iterations, out.trace,
                             [&](const NounCount& obs, const std::vector<double>& w, double* terms) {
                                 kern.product2(w.data(), nouns.row(obs.noun).data(), terms, k);
                             });
    return out;
}

SlotLabeling label_intransitive(const LCModel& model, const NounSample& sample, const LabelOptions& options) {
    return label_intransitive(NounLikelihoodView(model), sample, options);
}

SlotLabeling label_transitive(const NounLikelihoodView& nouns, const NounPairSample& sample,
                              const LabelOptions& options) {
    check_iterations(options);
    const std::size_t k = nouns.num_classes();
    SlotLabeling out;
    out.kind = SlotKind::transitive;
    out.num_classes = k;
    out.dropped_mass = unresolved_mass(sample.unresolved);

    std::vector<NounPairCount> usable;
    for (const auto& pc : sample.counts) {
        if (simd::ordered_sum(nouns.row(pc.subject)) > 0.0 && simd::ordered_sum(nouns.row(pc.object)) > 0.0) {
            usable.push_back(pc);
            out.used_mass += pc.count;
        } else {
            out.dropped_mass += pc.count;
        }
    }
    if (usable.empty()) throw EmptySampleError("no usable argument pairs for verb " + sample.verb);

    out.weights = initial_weights(k * k, options);
    const auto& kern = simd::kernels();
    run_weight_em<NounPairCount>(out.weights, usable, options.iterations, out.trace,
                                 [&](const NounPairCount& obs, const std::vector<double>& w, double* terms) {
                                     const auto subj = nouns.row(obs.subject);
                                     const auto obj = nouns.row(obs.object);
                                     for (std::size_t c1 = 0; c1 < k; ++c1) {
                                         kern.scaled_product(w.data() + c1 * k, subj[c1], obj.data(),
                                                             terms + c1 * k, k);
                                     }
                                 });
    return out;
}

SlotLabeling label_transitive(const LCModel& model, const NounPairSample& sample, const LabelOptions& options) {
    return label_transitive(NounLikelihoodView(model), sample, options);
}

// ---------------------------------------------------------------------------
// Lexicon entries

std::string LexiconEntry::slot_signature() const { return kind == SlotKind::intransitive ? "as:s" : "aso:s+o"; }

std::string LexiconEntry::label() const {
    if (kind == SlotKind::intransitive) return std::to_string(best_class);
    return "(" + std::to_string(best_class) + "," + std::to_string(best_object_class.value_or(0)) + ")";
}

namespace {

void rank_fillers(std::vector<Filler>& fillers, std::size_t top_k) {
    std::stable_sort(fillers.begin(), fillers.end(), [](const Filler& a, const Filler& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.noun != b.noun) return a.noun < b.noun;
        return a.object.value_or(0) < b.object.value_or(0);
    });
    if (fillers.size() > top_k) fillers.resize(top_k);
}

void check_labeling(const NounLikelihoodView& nouns, const SlotLabeling& labeling, SlotKind kind) {
    if (labeling.kind != kind) throw ValidationError("labeling kind does not match the sample");
    if (labeling.num_classes != nouns.num_classes()) throw ValidationError("labeling class count does not match model");
}

}  // namespace

LexiconEntry make_entry(const NounLikelihoodView& nouns, const SlotLabeling& labeling, const NounSample& sample,
                        std::size_t top_k) {
    check_labeling(nouns, labeling, SlotKind::intransitive);
    const std::size_t k = labeling.num_classes;
    LexiconEntry entry;
    entry.verb = sample.verb;
    entry.kind = SlotKind::intransitive;
    entry.best_class = argmax(labeling.weights);
    entry.best_prob = labeling.weights[entry.best_class];

    std::vector<double> terms(k);
    std::vector<Filler> fillers;
    for (const auto& nc : sample.counts) {
        simd::kernels().product2(labeling.weights.data(), nouns.row(nc.noun).data(), terms.data(), k);
        const double p = simd::ordered_sum(terms);
        if (!(p > 0.0)) continue;
        fillers.push_back({nc.noun, std::nullopt, nc.count * (terms[entry.best_class] / p)});
    }
    rank_fillers(fillers, top_k);
    entry.top_fillers = std::move(fillers);
    return entry;
}

LexiconEntry make_entry(const NounLikelihoodView& nouns, const SlotLabeling& labeling, const NounPairSample& sample,
                        std::size_t top_k) {
    check_labeling(nouns, labeling, SlotKind::transitive);
    const std::size_t k = labeling.num_classes;
    LexiconEntry entry;
    entry.verb = sample.verb;
    entry.kind = SlotKind::transitive;
    const std::size_t best = argmax(labeling.weights);
    entry.best_class = best / k;
    entry.best_object_class = best % k;
    entry.best_prob = labeling.weights[best];

    std::vector<double> terms(k * k);
    std::vector<Filler> fillers;
    for (const auto& pc : sample.counts) {
        const auto subj = nouns.row(pc.subject);
        const auto obj = nouns.row(pc.object);
        for (std::size_t c1 = 0; c1 < k; ++c1) {
            simd::kernels().scaled_product(labeling.weights.data() + c1 * k, subj[c1], obj.data(),
                                           terms.data() + c1 * k, k);
        }
        const double p = simd::ordered_sum(terms);
        if (!(p > 0.0)) continue;
        fillers.push_back({pc.subject, pc.object, pc.count * (terms[best] / p)});
    }
    rank_fillers(fillers, top_k);
    entry.top_fillers = std::move(fillers);
    return entry;
}

namespace {

template <typename Sample, typename LabelFn>
std::vector<LabeledVerb> label_all(const LCModel& model, std::span<const Sample> samples, std::size_t top_k,
                                   std::size_t threads, LabelFn label) {
    const NounLikelihoodView nouns(model);
    std::vector<LabeledVerb> results(samples.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < samples.size(); i = next++) {
            auto& r = results[i];
            r.verb = samples[i].verb;
            try {
                r.labeling = label(nouns, samples[i]);
                r.entry = make_entry(nouns, *r.labeling, samples[i], top_k);
            } catch (const std::exception& e) {
                r.labeling.reset();
                r.entry.reset();
                r.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(samples.size(), 1));
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::stable_sort(results.begin(), results.end(), [](const LabeledVerb& a, const LabeledVerb& b) {
        if (a.entry.has_value() != b.entry.has_value()) return a.entry.has_value();
        if (!a.entry) return false;
        return a.entry->best_prob > b.entry->best_prob;
    });
    return results;
}

}  // namespace

std::vector<LabeledVerb> label_many(const LCModel& model, std::span<const NounSample> samples,
                                    const LabelOptions& options, std::size_t top_k, std::size_t threads) {
    return label_all(model, samples, top_k, threads, [&](const NounLikelihoodView& nouns, const NounSample& s) {
        return label_intransitive(nouns, s, options);
    });
}

std::vector<LabeledVerb> label_many(const LCModel& model, std::span<const NounPairSample> samples,
                                    const LabelOptions& options, std::size_t top_k, std::size_t threads) {
    return label_all(model, samples, top_k, threads, [&](const NounLikelihoodView& nouns, const NounPairSample& s) {
        return label_transitive(nouns, s, options);
    });
}

namespace {

std::string filler_name(const Filler& f, const Vocabulary& vocabulary) {
    std::string name = vocabulary.nouns.at(f.noun);
    if (f.object) name += " - " + vocabulary.nouns.at(*f.object);
    return name;
}

}  // namespace

std::string lexicon_tsv_row(const LexiconEntry& entry, const Vocabulary& vocabulary) {
    std::string out = entry.verb + '\t' + entry.slot_signature() + '\t' + entry.label() + '\t' +
                      format_real(entry.best_prob) + '\t';
    for (std::size_t i = 0; i < entry.top_fillers.size(); ++i) {
        if (i) out += ';';
        out += filler_name(entry.top_fillers[i], vocabulary) + ':' + format_real(entry.top_fillers[i].score);
    }
    out += '\n';
    return out;
}

std::string lexicon_report(const LexiconEntry& entry, const Vocabulary& vocabulary) {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back(entry.verb + " " + entry.label(), format_fixed(entry.best_prob, 4));
    for (const auto& f : entry.top_fillers) rows.emplace_back(filler_name(f, vocabulary), format_fixed(f.score, 4));
    std::size_t width = 0;
    for (const auto& [left, right] : rows) width = std::max(width, left.size());
    std::string out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [left, right] = rows[i];
        out += left + std::string(width - left.size() + 2, ' ') + right + '\n';
        if (i == 0) out += std::string(width + 2 + right.size(), '-') + '\n';
    }
    return out;
}

}  // namespace lcm
