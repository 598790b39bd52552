#pragma once

// Shared fixtures and brute-force oracles for the test suites. Oracles work
// on plain class-major nested vectors and never call library queries.

#include "lcm/model.hpp"
#include "lcm/pair_counts.hpp"
#include "lcm/vocabulary.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace lcm::testing {

inline std::shared_ptr<Vocabulary> make_vocab(const std::vector<std::string>& verbs,
                                              const std::vector<std::string>& nouns) {
    auto vocab = std::make_shared<Vocabulary>();
    for (const auto& v : verbs) vocab->verbs.add_new(v);
    for (const auto& n : nouns) vocab->nouns.add_new(n);
    return vocab;
}

/// Class-major parameters: verb[c][v], noun[c][n].
struct DenseParams {
    std::vector<double> prior;
    std::vector<std::vector<double>> verb;
    std::vector<std::vector<double>> noun;
};

inline LCModel model_from(std::shared_ptr<const Vocabulary> vocab, const DenseParams& p) {
    const std::size_t k = p.prior.size();
    const std::size_t nv = vocab->verbs.size(), nn = vocab->nouns.size();
    std::vector<double> vt(nv * k), nt(nn * k);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t v = 0; v < nv; ++v) vt[v * k + c] = p.verb[c][v];
        for (std::size_t n = 0; n < nn; ++n) nt[n * k + c] = p.noun[c][n];
    }
    return LCModel(std::move(vocab), k, p.prior, std::move(vt), std::move(nt));
}

inline DenseParams params_of(const LCModel& m) {
    DenseParams p;
    const std::size_t k = m.num_classes();
    p.prior.assign(m.class_prior().begin(), m.class_prior().end());
    p.verb.assign(k, std::vector<double>(m.num_verbs()));
    p.noun.assign(k, std::vector<double>(m.num_nouns()));
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t v = 0; v < m.num_verbs(); ++v) p.verb[c][v] = m.verb_table()[v * k + c];
        for (std::size_t n = 0; n < m.num_nouns(); ++n) p.noun[c][n] = m.noun_table()[n * k + c];
    }
    return p;
}

// |C| = 2, V = {a, b, c}, N = {x, y, z}.
inline DenseParams fixture_params() {
    return DenseParams{{0.5, 0.5},
                       {{0.6, 0.3, 0.1}, {0.1, 0.3, 0.6}},
                       {{0.7, 0.2, 0.1}, {0.1, 0.2, 0.7}}};
}

inline std::shared_ptr<Vocabulary> fixture_vocab() {
    return make_vocab({"a.as:s", "b.as:s", "c.as:s"}, {"x", "y", "z"});
}

inline LCModel fixture_model() { return model_from(fixture_vocab(), fixture_params()); }

/// f(a,x) = 3, f(b,y) = 2, f(c,z) = 3.
inline PairCounts fixture_data() { return PairCounts(3, 3, {{0, 0, 3.0}, {1, 1, 2.0}, {2, 2, 3.0}}); }

/// sum_c p(c) p(v|c) p(n|c), naive order.
inline double oracle_joint(const DenseParams& p, std::size_t v, std::size_t n) {
    double s = 0.0;
    for (std::size_t c = 0; c < p.prior.size(); ++c) s += p.prior[c] * p.verb[c][v] * p.noun[c][n];
    return s;
}

/// Expected counts and one EM update by enumerating every (c, y).
struct OracleStep {
    DenseParams next;
    std::vector<std::vector<double>> verb_numer;  // [c][v]
    std::vector<std::vector<double>> noun_numer;  // [c][n]
    std::vector<double> class_mass;
    double log_likelihood = 0.0;
};

inline OracleStep oracle_em_step(const DenseParams& p, const PairCounts& data) {
    const std::size_t k = p.prior.size();
    const std::size_t nv = p.verb[0].size(), nn = p.noun[0].size();
    OracleStep o;
    o.verb_numer.assign(k, std::vector<double>(nv, 0.0));
    o.noun_numer.assign(k, std::vector<double>(nn, 0.0));
    o.class_mass.assign(k, 0.0);
    double total = 0.0;
    for (const auto& e : data.entries()) {
        const double py = oracle_joint(p, e.verb, e.noun);
        o.log_likelihood += e.count * std::log(py);
        total += e.count;
        for (std::size_t c = 0; c < k; ++c) {
            const double post = p.prior[c] * p.verb[c][e.verb] * p.noun[c][e.noun] / py;
            o.verb_numer[c][e.verb] += e.count * post;
            o.noun_numer[c][e.noun] += e.count * post;
            o.class_mass[c] += e.count * post;
        }
    }
    o.next = p;
    for (std::size_t c = 0; c < k; ++c) {
        o.next.prior[c] = o.class_mass[c] / total;
        for (std::size_t v = 0; v < nv; ++v) o.next.verb[c][v] = o.verb_numer[c][v] / o.class_mass[c];
        for (std::size_t n = 0; n < nn; ++n) o.next.noun[c][n] = o.noun_numer[c][n] / o.class_mass[c];
    }
    return o;
}

struct RandomInstance {
    std::shared_ptr<Vocabulary> vocab;
    PairCounts data;
    std::size_t num_classes = 1;
};

/// Random small corpus: |V|, |N| in [2, max_symbols], |C| in [1, max_classes],
/// up to max_tokens tokens on uniformly drawn pairs.
inline RandomInstance random_instance(std::uint64_t seed, std::size_t max_symbols = 20, std::size_t max_classes = 5,
                                      std::size_t max_tokens = 500) {
    std::mt19937_64 gen(seed * 7919 + 17);
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(gen() % (hi - lo + 1));
    };
    const std::size_t nv = pick(2, max_symbols), nn = pick(2, max_symbols);
    RandomInstance r;
    r.num_classes = pick(1, max_classes);
    r.vocab = std::make_shared<Vocabulary>();
    for (std::size_t v = 0; v < nv; ++v) r.vocab->verbs.add_new("v" + std::to_string(v) + ".as:s");
    for (std::size_t n = 0; n < nn; ++n) r.vocab->nouns.add_new("n" + std::to_string(n));
    const std::size_t tokens = pick(1, max_tokens);
    std::vector<PairEntry> entries;
    for (std::size_t t = 0; t < tokens; ++t) {
        entries.push_back({static_cast<SymbolIndex>(pick(0, nv - 1)), static_cast<SymbolIndex>(pick(0, nn - 1)), 1.0});
    }
    r.data = PairCounts(nv, nn, std::move(entries));
    return r;
}

}  // namespace lcm::testing
