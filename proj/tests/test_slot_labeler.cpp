#include "fixtures.hpp"

#include "lcm/errors.hpp"
#include "lcm/rng.hpp"
#include "lcm/slot_labeler.hpp"
#include "lcm/trainer.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace lcm;
using namespace lcm::testing;

namespace {

// p(n|c) from the hand-worked example, row per noun: x, y.
const std::vector<double> kHandTable{0.9, 0.1, 0.2, 0.8};

NounSample hand_sample() { return {"sleep.as:s", {{0, 3.0}, {1, 1.0}}, {}}; }

// Valid model with the same posteriors as kHandTable: x|1 = .45, y|1 = .1, z|1 = .45.
LCModel hand_model() {
    return model_from(make_vocab({"run.as:s"}, {"x", "y", "z"}),
                      DenseParams{{0.5, 0.5}, {{1.0}, {1.0}}, {{0.45, 0.1, 0.45}, {0.05, 0.4, 0.55}}});
}

LabelOptions one_step() {
    LabelOptions o;
    o.iterations = 1;
    return o;
}

// One mixture-weight step for the intransitive slot, term by term.
std::vector<double> oracle_intrans_step(const std::vector<std::vector<double>>& pnc, const std::vector<double>& w,
                                        const std::vector<double>& f) {
    const std::size_t k = w.size();
    std::vector<double> next(k, 0.0);
    double total = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) {
        double z = 0.0;
        for (std::size_t c = 0; c < k; ++c) z += w[c] * pnc[n][c];
        for (std::size_t c = 0; c < k; ++c) next[c] += f[n] * w[c] * pnc[n][c] / z;
        total += f[n];
    }
    for (double& x : next) x /= total;
    return next;
}

// One step for the class-pair matrix, enumerating every (c1, c2, n1, n2).
std::vector<double> oracle_trans_step(const std::vector<std::vector<double>>& pnc, const std::vector<double>& w,
                                      const std::vector<std::vector<double>>& f) {
    const std::size_t k = pnc[0].size();
    std::vector<double> next(k * k, 0.0);
    double total = 0.0;
    for (std::size_t a = 0; a < f.size(); ++a) {
        for (std::size_t b = 0; b < f[a].size(); ++b) {
            if (f[a][b] == 0.0) continue;
            double z = 0.0;
            for (std::size_t c1 = 0; c1 < k; ++c1)
                for (std::size_t c2 = 0; c2 < k; ++c2) z += w[c1 * k + c2] * pnc[a][c1] * pnc[b][c2];
            for (std::size_t c1 = 0; c1 < k; ++c1)
                for (std::size_t c2 = 0; c2 < k; ++c2)
                    next[c1 * k + c2] += f[a][b] * w[c1 * k + c2] * pnc[a][c1] * pnc[b][c2] / z;
            total += f[a][b];
        }
    }
    for (double& x : next) x /= total;
    return next;
}

}  // namespace

TEST_CASE("hand-worked intransitive step") {
    NounLikelihoodView view(2, kHandTable);
    auto lab = label_intransitive(view, hand_sample(), one_step());
    CHECK(std::abs(lab.weight(0) - 0.725) <= 1e-12);
    CHECK(std::abs(lab.weight(1) - 0.275) <= 1e-12);
    CHECK(lab.trace.size() == 2);
    CHECK(lab.used_mass == 4.0);
    CHECK(lab.dropped_mass == 0.0);

    auto model = hand_model();
    auto via_model = label_intransitive(model, hand_sample(), one_step());
    CHECK(std::abs(via_model.weight(0) - 0.725) <= 1e-12);
    CHECK(std::abs(via_model.weight(1) - 0.275) <= 1e-12);

    auto oracle = oracle_intrans_step({{0.9, 0.1}, {0.2, 0.8}}, {0.5, 0.5}, {3.0, 1.0});
    CHECK(std::abs(oracle[0] - 0.725) <= 1e-15);
}

TEST_CASE("hand-worked lexicon entry") {
    NounLikelihoodView view(2, kHandTable);
    auto lab = label_intransitive(view, hand_sample(), one_step());
    auto entry = make_entry(view, lab, hand_sample(), 2);
    CHECK(entry.best_class == 0);
    CHECK(entry.best_prob == lab.weight(0));
    REQUIRE(entry.top_fillers.size() == 2);
    const double t0 = lab.weight(0), t1 = lab.weight(1);
    const double px = t0 * 0.9 / (t0 * 0.9 + t1 * 0.1);
    const double py = t0 * 0.2 / (t0 * 0.2 + t1 * 0.8);
    CHECK(entry.top_fillers[0].noun == 0);
    CHECK(entry.top_fillers[0].score == doctest::Approx(3.0 * px).epsilon(1e-14));
    CHECK(entry.top_fillers[1].noun == 1);
    CHECK(entry.top_fillers[1].score == doctest::Approx(1.0 * py).epsilon(1e-14));
    CHECK(entry.label() == "0");
    CHECK(entry.slot_signature() == "as:s");

    CHECK(make_entry(view, lab, hand_sample(), 0).top_fillers.empty());
    CHECK(make_entry(view, lab, hand_sample(), 1).top_fillers.size() == 1);
}

TEST_CASE("single class labels are trivially one") {
    auto inst = random_instance(8, 10, 1, 200);
    TrainConfig config;
    config.num_classes = 1;
    auto model = train(config, inst.data, inst.vocab).model;
    NounSample s{"anything.as:s", {}, {}};
    for (SymbolIndex n = 0; n < model.num_nouns(); ++n) {
        if (model.noun_given_class(0, n) > 0) s.counts.push_back({n, 1.0 + n});
    }
    auto lab = label_intransitive(model, s);
    CHECK(lab.weights == std::vector<double>{1.0});

    NounPairSample ps{"anything.aso:s", {}, {}};
    for (const auto& a : s.counts) ps.counts.push_back({a.noun, s.counts.front().noun, 2.0});
    std::sort(ps.counts.begin(), ps.counts.end(),
              [](auto& x, auto& y) { return std::pair(x.subject, x.object) < std::pair(y.subject, y.object); });
    auto tl = label_transitive(model, ps);
    CHECK(tl.weights == std::vector<double>{1.0});
    CHECK(make_entry(NounLikelihoodView(model), tl, ps, 3).label() == "(0,0)");
}

TEST_CASE("class with no support in the sample goes to zero") {
    // class 1 gives zero probability to both sample nouns
    const std::vector<double> table{0.5, 0.0, 0.5, 0.0, 0.0, 1.0};
    NounLikelihoodView view(2, table);
    NounSample s{"v.as:s", {{0, 4.0}, {1, 2.0}}, {}};
    auto lab = label_intransitive(view, s, one_step());
    CHECK(lab.weights == std::vector<double>{1.0, 0.0});
}

TEST_CASE("transitive step matches enumeration and keeps independence") {
    const std::vector<std::vector<double>> pnc{{0.7, 0.2}, {0.3, 0.8}};
    const std::vector<double> table{0.7, 0.2, 0.3, 0.8};
    NounLikelihoodView view(2, table);
    const std::vector<double> g{3.0, 1.0}, h{2.0, 5.0};
    NounPairSample s{"eat.aso:s", {}, {}};
    std::vector<std::vector<double>> f(2, std::vector<double>(2));
    for (SymbolIndex a = 0; a < 2; ++a) {
        for (SymbolIndex b = 0; b < 2; ++b) {
            f[a][b] = g[a] * h[b];
            s.counts.push_back({a, b, f[a][b]});
        }
    }
    auto lab = label_transitive(view, s, one_step());
    auto oracle = oracle_trans_step(pnc, {0.25, 0.25, 0.25, 0.25}, f);
    auto subj = oracle_intrans_step(pnc, {0.5, 0.5}, g);
    auto obj = oracle_intrans_step(pnc, {0.5, 0.5}, h);
    for (std::size_t c1 = 0; c1 < 2; ++c1) {
        for (std::size_t c2 = 0; c2 < 2; ++c2) {
            CHECK(std::abs(lab.weight(c1, c2) - oracle[c1 * 2 + c2]) <= 1e-14);
            CHECK(std::abs(lab.weight(c1, c2) - subj[c1] * obj[c2]) <= 1e-14);
        }
    }

    // A non-factorizing sample on a random table, several steps.
    Rng rng(3);
    const std::size_t k = 3, nn = 4;
    std::vector<std::vector<double>> rp(nn, std::vector<double>(k));
    std::vector<double> flat;
    for (auto& row : rp)
        for (double& x : row) x = rng.uniform(0.05, 1.0);
    for (std::size_t c = 0; c < k; ++c) {
        double sum = 0;
        for (auto& row : rp) sum += row[c];
        for (auto& row : rp) row[c] /= sum;
    }
    for (auto& row : rp) flat.insert(flat.end(), row.begin(), row.end());
    NounLikelihoodView rview(k, flat);
    std::vector<std::vector<double>> rf(nn, std::vector<double>(nn, 0.0));
    NounPairSample rs{"give.aso:s", {}, {}};
    for (SymbolIndex a = 0; a < nn; ++a) {
        for (SymbolIndex b = 0; b < nn; ++b) {
            if ((a + b) % 3 == 0) continue;
            rf[a][b] = 1.0 + a * 2 + b;
            rs.counts.push_back({a, b, rf[a][b]});
        }
    }
    LabelOptions opts;
    opts.iterations = 4;
    auto rl = label_transitive(rview, rs, opts);
    std::vector<double> w(k * k, 1.0 / 9.0);
    for (int t = 0; t < 4; ++t) w = oracle_trans_step(rp, w, rf);
    for (std::size_t i = 0; i < k * k; ++i) CHECK(std::abs(rl.weights[i] - w[i]) <= 1e-13);
}

TEST_CASE("labeling invariants on trained models") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        auto inst = random_instance(seed, 15, 4, 400);
        TrainConfig config;
        config.num_classes = inst.num_classes;
        config.iterations = 5;
        config.seed = seed;
        auto model = train(config, inst.data, inst.vocab).model;
        const auto before_nouns = model.noun_table();
        std::vector<double> nouns_copy(before_nouns.begin(), before_nouns.end());
        std::vector<double> verbs_copy(model.verb_table().begin(), model.verb_table().end());
        std::vector<double> prior_copy(model.class_prior().begin(), model.class_prior().end());

        NounSample s{"unseen.as:s", {}, {{"ghost", 2.5}}};
        NounPairSample ps{"unseen.aso:s", {}, {{"ghost", 1.0}}};
        Rng rng(seed + 100);
        for (SymbolIndex n = 0; n < model.num_nouns(); ++n) {
            if (rng.uniform() < 0.6) s.counts.push_back({n, std::floor(rng.uniform(1.0, 6.0))});
            for (SymbolIndex m = 0; m < model.num_nouns(); ++m) {
                if (rng.uniform() < 0.2) ps.counts.push_back({n, m, std::floor(rng.uniform(1.0, 4.0))});
            }
        }
        if (s.counts.empty()) s.counts.push_back({0, 1.0});
        if (ps.counts.empty()) ps.counts.push_back({0, 0, 1.0});

        LabelOptions opts;
        opts.iterations = 12;
        opts.init = seed % 2 ? LabelInit::random : LabelInit::uniform;
        opts.seed = seed;
        for (int kind = 0; kind < 2; ++kind) {
            SlotLabeling lab = kind == 0 ? label_intransitive(model, s, opts) : label_transitive(model, ps, opts);
            double sum = 0.0;
            for (double x : lab.weights) {
                CHECK(x >= 0.0);
                sum += x;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-10);
            REQUIRE(lab.trace.size() == 13);
            for (std::size_t t = 1; t < lab.trace.size(); ++t) {
                CHECK(lab.trace[t] >= lab.trace[t - 1] - 1e-9 * std::abs(lab.trace[t - 1]));
            }
        }
        auto lab = label_intransitive(model, s, opts);
        CHECK(lab.dropped_mass >= 2.5);

        CHECK(std::memcmp(nouns_copy.data(), model.noun_table().data(), nouns_copy.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(verbs_copy.data(), model.verb_table().data(), verbs_copy.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(prior_copy.data(), model.class_prior().data(), prior_copy.size() * sizeof(double)) == 0);

        // Rescaling every frequency rescales scores and leaves the ranking alone.
        NounLikelihoodView view(model);
        auto entry = make_entry(view, lab, s, 50);
        NounSample scaled = s;
        for (auto& nc : scaled.counts) nc.count *= 7.0;
        auto scaled_lab = label_intransitive(model, scaled, opts);
        auto scaled_entry = make_entry(view, scaled_lab, scaled, 50);
        CHECK(scaled_entry.best_class == entry.best_class);
        REQUIRE(scaled_entry.top_fillers.size() == entry.top_fillers.size());
        for (std::size_t i = 0; i < entry.top_fillers.size(); ++i) {
            CHECK(scaled_entry.top_fillers[i].noun == entry.top_fillers[i].noun);
            CHECK(scaled_entry.top_fillers[i].score ==
                  doctest::Approx(7.0 * entry.top_fillers[i].score).epsilon(1e-9));
        }
    }
}

TEST_CASE("labeling errors") {
    NounLikelihoodView view(2, kHandTable);
    NounSample only_unresolved{"v.as:s", {}, {{"ghost", 3.0}}};
    CHECK_THROWS_AS(label_intransitive(view, only_unresolved), EmptySampleError);
    LabelOptions zero;
    zero.iterations = 0;
    CHECK_THROWS_AS(label_intransitive(view, hand_sample(), zero), ValidationError);
    NounSample out_of_range{"v.as:s", {{5, 1.0}}, {}};
    CHECK_THROWS_AS(label_intransitive(view, out_of_range), IndexError);
    CHECK_THROWS_AS(NounLikelihoodView(3, kHandTable), ValidationError);
    auto lab = label_intransitive(view, hand_sample());
    NounPairSample ps{"v.aso:s", {{0, 1, 1.0}}, {}};
    CHECK_THROWS_AS(make_entry(view, lab, ps, 3), ValidationError);
}

TEST_CASE("label_many ordering and output formats") {
    auto model = hand_model();
    std::vector<NounSample> samples{
        {"mixed.as:s", {{0, 1.0}, {1, 1.0}}, {}},
        {"broken.as:s", {}, {{"ghost", 1.0}}},
        {"sharp.as:s", {{0, 5.0}}, {}},
        {"other.as:s", {{1, 4.0}}, {}},
    };
    for (std::size_t threads : {1u, 3u}) {
        auto out = label_many(model, std::span<const NounSample>(samples), {}, 2, threads);
        REQUIRE(out.size() == 4);
        CHECK(out.back().verb == "broken.as:s");
        CHECK_FALSE(out.back().error.empty());
        CHECK_FALSE(out.back().entry.has_value());
        for (std::size_t i = 0; i + 2 < out.size(); ++i) {
            CHECK(out[i].entry->best_prob >= out[i + 1].entry->best_prob);
        }
        for (const auto& r : out) {
            if (!r.entry) continue;
            const auto& sample = *std::find_if(samples.begin(), samples.end(), [&](auto& x) { return x.verb == r.verb; });
            auto direct = label_intransitive(model, sample);
            CHECK(r.labeling->weights == direct.weights);
        }
    }

    const auto& vocab = model.vocabulary();
    LexiconEntry e;
    e.verb = "sleep.as:s";
    e.best_class = 1;
    e.best_prob = 0.5;
    e.top_fillers = {{0, std::nullopt, 2.0}, {2, std::nullopt, 0.25}};
    CHECK(lexicon_tsv_row(e, vocab) == "sleep.as:s\tas:s\t1\t0.5\tx:2;z:0.25\n");
    CHECK(lexicon_report(e, vocab) ==
          "sleep.as:s 1  0.5000\n"
          "--------------------\n"
          "x             2.0000\n"
          "z             0.2500\n");

    LexiconEntry t;
    t.verb = "eat.aso:s";
    t.kind = SlotKind::transitive;
    t.best_class = 0;
    t.best_object_class = 1;
    t.best_prob = 0.75;
    t.top_fillers = {{1, 2, 1.5}};
    CHECK(t.label() == "(0,1)");
    CHECK(lexicon_tsv_row(t, vocab) == "eat.aso:s\taso:s+o\t(0,1)\t0.75\ty - z:1.5\n");
}
