#include "lcm/trainer.hpp"

#include "lcm/errors.hpp"
#include "lcm/rng.hpp"
#include "lcm/simd/kernels.hpp"
#include "lcm/text_util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <set>
#include <thread>

namespace lcm {
namespace {

constexpr std::size_t kTypesPerPartition = 32768;
constexpr std::size_t kMaxPartitions = 16;

void validate(const TrainConfig& config, const PairCounts& data, const Vocabulary& vocabulary) {
    if (config.num_classes == 0) throw ValidationError("num_classes must be at least 1");
    if (config.iterations == 0) throw ValidationError("iterations must be at least 1");
    if (!(config.likelihood_tolerance >= 0.0)) throw ValidationError("likelihood_tolerance must be non-negative");
    if (data.empty()) throw ValidationError("training data is empty");
    if (data.num_verbs() > vocabulary.verbs.size() || data.num_nouns() > vocabulary.nouns.size()) {
        throw ValidationError("training data indices exceed the vocabulary");
    }
}

// Partition boundaries over the sorted entries, cut at verb changes so that
// partitions touch disjoint rows of the verb table.
std::vector<std::size_t> partition_bounds(std::span<const PairEntry> entries) {
    const std::size_t types = entries.size();
    const std::size_t parts = std::clamp<std::size_t>((types + kTypesPerPartition - 1) / kTypesPerPartition, 1,
                                                      kMaxPartitions);
    std::vector<std::size_t> bounds{0};
    for (std::size_t p = 1; p < parts; ++p) {
        std::size_t cut = std::max(bounds.back(), types * p / parts);
        while (cut > 0 && cut < types && entries[cut].verb == entries[cut - 1].verb) ++cut;
        bounds.push_back(cut);
    }
    bounds.push_back(types);
    return bounds;
}

struct PartialCounts {
    std::vector<double> noun;
    std::vector<double> class_mass;
    double log_likelihood = 0.0;
};

void accumulate_partition(const LCModel& model, std::span<const PairEntry> entries, std::vector<double>& verb_acc,
                          PartialCounts& part) {
    const std::size_t k = model.num_classes();
    const auto& kern = simd::kernels();
    const double* prior = model.class_prior().data();
    std::vector<double> terms(k);
    for (const auto& e : entries) {
        kern.product3(prior, model.verb_row(e.verb).data(), model.noun_row(e.noun).data(), terms.data(), k);
        const double p = simd::ordered_sum(terms);
        if (!(p > 0.0)) {
            throw TrainingDegeneracyError("observed pair (" + model.vocabulary().verbs.at(e.verb) + ", " +
                                          model.vocabulary().nouns.at(e.noun) + ") has zero probability");
        }
        part.log_likelihood += e.count * std::log(p);
        const double scale = e.count / p;
        kern.accumulate(verb_acc.data() + std::size_t{e.verb} * k, terms.data(), scale, k);
        kern.accumulate(part.noun.data() + std::size_t{e.noun} * k, terms.data(), scale, k);
        kern.accumulate(part.class_mass.data(), terms.data(), scale, k);
    }
}

std::vector<double> uniform_distribution(Rng& rng, std::size_t n) {
    std::vector<double> out(n);
    for (double& x : out) x = rng.uniform(0.1, 1.0);
    const double sum = simd::ordered_sum(out);
    for (double& x : out) x /= sum;
    return out;
}

}  // namespace

std::string TrainTrace::to_tsv() const {
    std::string out = "iteration\tlog_likelihood\n";
    for (std::size_t t = 0; t < log_likelihood.size(); ++t) {
        out += std::to_string(t) + '\t' + format_real(log_likelihood[t]) + '\n';
    }
    return out;
}

LCModel init_model(const TrainConfig& config, std::shared_ptr<const Vocabulary> vocabulary) {
    if (!vocabulary || vocabulary->verbs.empty() || vocabulary->nouns.empty()) {
        throw ValidationError("cannot initialize a model over an empty vocabulary");
    }
    if (config.num_classes == 0) throw ValidationError("num_classes must be at least 1");
    const std::size_t k = config.num_classes;
    const std::size_t nv = vocabulary->verbs.size();
    const std::size_t nn = vocabulary->nouns.size();

    Rng rng(config.seed);
    auto prior = uniform_distribution(rng, k);
    std::vector<double> verb_table(nv * k);
    std::vector<double> noun_table(nn * k);
    for (std::size_t c = 0; c < k; ++c) {
        auto dist = uniform_distribution(rng, nv);
        for (std::size_t v = 0; v < nv; ++v) verb_table[v * k + c] = dist[v];
    }
    for (std::size_t c = 0; c < k; ++c) {
        auto dist = uniform_distribution(rng, nn);
        for (std::size_t n = 0; n < nn; ++n) noun_table[n * k + c] = dist[n];
    }
    return LCModel(std::move(vocabulary), k, std::move(prior), std::move(verb_table), std::move(noun_table));
}

ExpectedCounts expected_counts(const LCModel& model, const PairCounts& data, std::size_t threads) {
    if (data.num_verbs() > model.num_verbs() || data.num_nouns() > model.num_nouns()) {
        throw IndexError("data indices exceed model vocabulary");
    }
    const std::size_t k = model.num_classes();
    ExpectedCounts out;
    out.num_classes = k;
    out.verb.assign(model.num_verbs() * k, 0.0);
    out.total_tokens = data.total_tokens();

    const auto entries = data.entries();
    const auto bounds = partition_bounds(entries);
    const std::size_t parts = bounds.size() - 1;
    std::vector<PartialCounts> partials(parts);
    for (auto& part : partials) {
        part.noun.assign(model.num_nouns() * k, 0.0);
        part.class_mass.assign(k, 0.0);
    }
    std::vector<std::exception_ptr> errors(parts);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t p = next++; p < parts; p = next++) {
            try {
                accumulate_partition(model, entries.subspan(bounds[p], bounds[p + 1] - bounds[p]), out.verb,
                                     partials[p]);
            } catch (...) {
                errors[p] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, parts);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    out.noun = std::move(partials[0].noun);
    out.class_mass = std::move(partials[0].class_mass);
    out.log_likelihood = partials[0].log_likelihood;
    for (std::size_t p = 1; p < parts; ++p) {
        for (std::size_t i = 0; i < out.noun.size(); ++i) out.noun[i] += partials[p].noun[i];
        for (std::size_t c = 0; c < k; ++c) out.class_mass[c] += partials[p].class_mass[c];
        out.log_likelihood += partials[p].log_likelihood;
    }
    return out;
}

EmStepResult maximize(const LCModel& model, const ExpectedCounts& counts) {
    const std::size_t k = model.num_classes();
    if (counts.num_classes != k || counts.verb.size() != model.verb_table().size() ||
        counts.noun.size() != model.noun_table().size()) {
        throw ValidationError("expected counts do not match the model shape");
    }
    if (!(counts.total_tokens > 0.0)) throw ValidationError("expected counts over an empty sample");

    std::vector<double> prior(k);
    for (std::size_t c = 0; c < k; ++c) prior[c] = counts.class_mass[c] / counts.total_tokens;

    std::vector<std::size_t> degenerate;
    for (std::size_t c = 0; c < k; ++c) {
        if (!(counts.class_mass[c] > 0.0)) degenerate.push_back(c);
    }
    auto reestimate = [&](const std::vector<double>& acc, std::span<const double> old) {
        std::vector<double> table(acc.size());
        for (std::size_t i = 0; i < acc.size(); ++i) {
            const double mass = counts.class_mass[i % k];
            table[i] = mass > 0.0 ? acc[i] / mass : old[i];
        }
        return table;
    };
    auto verb_table = reestimate(counts.verb, model.verb_table());
    auto noun_table = reestimate(counts.noun, model.noun_table());
    return EmStepResult{
        LCModel(model.shared_vocabulary(), k, std::move(prior), std::move(verb_table), std::move(noun_table)),
        counts.log_likelihood, std::move(degenerate)};
}

EmStepResult em_step_detailed(const LCModel& model, const PairCounts& data, std::size_t threads) {
    if (data.empty()) throw ValidationError("training data is empty");
    return maximize(model, expected_counts(model, data, threads));
}

LCModel em_step(const LCModel& model, const PairCounts& data) { return em_step_detailed(model, data).model; }

TrainResult train(const TrainConfig& config, const PairCounts& data, std::shared_ptr<const Vocabulary> vocabulary,
                  const IterationObserver& observer) {
    if (!vocabulary) throw ValidationError("no vocabulary");
    validate(config, data, *vocabulary);

    LCModel model = init_model(config, std::move(vocabulary));
    if (observer) observer(0, model);
    TrainTrace trace;
    auto& ll = trace.log_likelihood;
    for (std::size_t t = 1; t <= config.iterations; ++t) {
        try {
            auto step = em_step_detailed(model, data, config.threads);
            ll.push_back(step.log_likelihood_before);
            for (auto c : step.degenerate_classes) trace.degenerate_classes.emplace_back(t, c);
            model = std::move(step.model);
        } catch (const Error& e) {
            throw TrainingDegeneracyError("iteration " + std::to_string(t) + ": " + e.what(), t);
        }
        trace.iterations_run = t;
        if (observer) observer(t, model);
        if (config.likelihood_tolerance > 0.0 && ll.size() >= 2) {
            const double prev = ll[ll.size() - 2];
            const double gain = (ll.back() - prev) / std::abs(prev);
            if (gain < config.likelihood_tolerance) break;
        }
    }
    try {
        ll.push_back(log_likelihood(model, data));
    } catch (const Error& e) {
        throw TrainingDegeneracyError("final model: " + std::string(e.what()), trace.iterations_run);
    }
    return TrainResult{std::move(model), std::move(trace)};
}

std::vector<GridCell> grid_train(const PairCounts& data, std::shared_ptr<const Vocabulary> vocabulary,
                                 const std::vector<std::uint64_t>& seeds, const std::vector<std::size_t>& class_counts,
                                 const std::vector<std::size_t>& iteration_counts, std::size_t threads) {
    if (seeds.empty() || class_counts.empty() || iteration_counts.empty()) {
        throw ValidationError("grid_train needs non-empty seed, class and iteration lists");
    }
    std::vector<GridCell> cells;
    cells.reserve(seeds.size() * class_counts.size() * iteration_counts.size());
    const std::size_t max_iterations = *std::max_element(iteration_counts.begin(), iteration_counts.end());
    const std::set<std::size_t> wanted(iteration_counts.begin(), iteration_counts.end());

    auto make_config = [&](std::uint64_t seed, std::size_t classes, std::size_t iterations) {
        TrainConfig config;
        config.seed = seed;
        config.num_classes = classes;
        config.iterations = iterations;
        config.threads = threads;
        return config;
    };
    auto run_single = [&](GridCell& cell) {
        try {
            auto result = train(cell.config, data, vocabulary);
            cell.model = std::move(result.model);
            cell.trace = std::move(result.trace);
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
        }
    };

    for (auto seed : seeds) {
        for (auto classes : class_counts) {
            std::map<std::size_t, LCModel> snapshots;
            std::optional<TrainResult> full;
            try {
                full = train(make_config(seed, classes, max_iterations), data, vocabulary,
                             [&](std::size_t t, const LCModel& m) {
                                 if (wanted.count(t)) snapshots.insert_or_assign(t, m);
                             });
            } catch (const std::exception&) {
                full.reset();
            }
            for (auto iterations : iteration_counts) {
                GridCell cell;
                cell.config = make_config(seed, classes, iterations);
                if (full && snapshots.count(iterations)) {
                    cell.model = snapshots.at(iterations);
                    const auto& ll = full->trace.log_likelihood;
                    cell.trace.log_likelihood.assign(ll.begin(), ll.begin() + static_cast<std::ptrdiff_t>(iterations + 1));
                    // train() takes its last entry from log_likelihood(); match it exactly.
                    cell.trace.log_likelihood.back() = log_likelihood(*cell.model, data);
                    cell.trace.iterations_run = iterations;
                    for (auto [t, c] : full->trace.degenerate_classes) {
                        if (t <= iterations) cell.trace.degenerate_classes.emplace_back(t, c);
                    }
                } else {
                    run_single(cell);
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

}  // namespace lcm
