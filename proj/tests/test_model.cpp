#include "fixtures.hpp"

#include "lcm/errors.hpp"
#include "lcm/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lcm;
using namespace lcm::testing;

namespace {

// |C| = 1 with p(a) = p(x) = 2/3, p(b) = p(y) = 1/3.
LCModel single_class_model() {
    return model_from(make_vocab({"a.as:s", "b.as:s"}, {"x", "y"}),
                      DenseParams{{1.0}, {{2.0 / 3.0, 1.0 / 3.0}}, {{2.0 / 3.0, 1.0 / 3.0}}});
}

std::vector<double> random_dist(std::mt19937_64& gen, std::size_t n, bool allow_zeros) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (allow_zeros && i > 0 && u(gen) < 0.2) ? 0.0 : u(gen) + 1e-3;
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

LCModel random_model(std::uint64_t seed, bool allow_zeros = false) {
    std::mt19937_64 gen(seed);
    const std::size_t k = 1 + gen() % 6, nv = 1 + gen() % 12, nn = 1 + gen() % 12;
    auto vocab = std::make_shared<Vocabulary>();
    for (std::size_t v = 0; v < nv; ++v) vocab->verbs.add_new("v" + std::to_string(v) + ".as:s");
    for (std::size_t n = 0; n < nn; ++n) vocab->nouns.add_new("n" + std::to_string(n));
    DenseParams p;
    p.prior = random_dist(gen, k, false);
    for (std::size_t c = 0; c < k; ++c) {
        p.verb.push_back(random_dist(gen, nv, allow_zeros));
        p.noun.push_back(random_dist(gen, nn, allow_zeros));
    }
    return model_from(vocab, p);
}

}  // namespace

TEST_CASE("joint_prob") {
    auto single = single_class_model();
    CHECK(joint_prob(single, 0, 0) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));

    auto m = fixture_model();
    const auto p = fixture_params();
    for (SymbolIndex v = 0; v < 3; ++v) {
        for (SymbolIndex n = 0; n < 3; ++n) {
            const double j = joint_prob(m, v, n);
            CHECK(j == doctest::Approx(oracle_joint(p, v, n)).epsilon(1e-14));
            CHECK(j >= 0.0);
            CHECK(j <= std::min(verb_marginal(m, v), 1.0));
        }
    }
    CHECK(joint_prob(m, 0, 0) == doctest::Approx(0.215).epsilon(1e-14));
    CHECK(joint_prob(m, 0, 1) == doctest::Approx(0.07).epsilon(1e-14));
    CHECK_THROWS_AS(joint_prob(m, 3, 0), IndexError);
    CHECK_THROWS_AS(joint_prob(m, 0, 3), IndexError);
}

TEST_CASE("class_posterior") {
    auto single = single_class_model();
    CHECK(class_posterior(single, 1, 0) == std::vector<double>{1.0});

    auto symmetric = model_from(make_vocab({"a.as:s"}, {"x", "y"}),
                                DenseParams{{0.5, 0.5}, {{1.0}, {1.0}}, {{0.3, 0.7}, {0.3, 0.7}}});
    CHECK(class_posterior(symmetric, 0, 1) == std::vector<double>{0.5, 0.5});

    // (a, x): 0.5*0.6*0.7 = 0.21 and 0.5*0.1*0.1 = 0.005, so p(1|a,x) = 42/43.
    auto post = class_posterior(fixture_model(), 0, 0);
    CHECK(post[0] == doctest::Approx(42.0 / 43.0).epsilon(1e-15));
    CHECK(post[1] == doctest::Approx(1.0 / 43.0).epsilon(1e-15));

    auto sparse = model_from(make_vocab({"a.as:s", "b.as:s"}, {"x", "y"}),
                             DenseParams{{1.0}, {{1.0, 0.0}}, {{0.5, 0.5}}});
    CHECK_THROWS_AS(class_posterior(sparse, 1, 0), UndefinedPosteriorError);
}

TEST_CASE("cond_noun_given_verb") {
    auto single = single_class_model();
    // class independence: p(n|v) = p(n) exactly for every v
    for (SymbolIndex v = 0; v < 2; ++v) {
        CHECK(cond_noun_given_verb(single, v, 0) == 2.0 / 3.0);
        CHECK(cond_noun_given_verb(single, v, 1) == 1.0 / 3.0);
    }
    auto m = fixture_model();
    const auto p = fixture_params();
    for (SymbolIndex v = 0; v < 3; ++v) {
        double marginal = 0.0;
        for (std::size_t c = 0; c < 2; ++c) marginal += p.prior[c] * p.verb[c][v];
        double total = 0.0;
        for (SymbolIndex n = 0; n < 3; ++n) {
            const double cond = cond_noun_given_verb(m, v, n);
            CHECK(cond == doctest::Approx(oracle_joint(p, v, n) / marginal).epsilon(1e-14));
            total += cond;
        }
        CHECK(std::abs(total - 1.0) <= 1e-10);
    }
    auto sparse = model_from(make_vocab({"a.as:s", "b.as:s"}, {"x"}), DenseParams{{1.0}, {{1.0, 0.0}}, {{1.0}}});
    CHECK_THROWS_AS(cond_noun_given_verb(sparse, 1, 0), UndefinedConditionalError);
}

TEST_CASE("log_likelihood") {
    auto single = single_class_model();
    CHECK(log_likelihood(single, PairCounts(2, 2, {{0, 0, 1.0}})) ==
          doctest::Approx(std::log(4.0 / 9.0)).epsilon(1e-15));
    PairCounts data(2, 2, {{0, 0, 2.0}, {1, 1, 1.0}});
    CHECK(log_likelihood(single, data) ==
          doctest::Approx(2.0 * std::log(4.0 / 9.0) + std::log(1.0 / 9.0)).epsilon(1e-14));

    auto m = fixture_model();
    auto fixture = fixture_data();
    double oracle = 0.0;
    for (const auto& e : fixture.entries()) oracle += e.count * std::log(oracle_joint(fixture_params(), e.verb, e.noun));
    CHECK(log_likelihood(m, fixture) == doctest::Approx(oracle).epsilon(1e-14));

    auto sparse = model_from(make_vocab({"a.as:s", "b.as:s"}, {"x"}), DenseParams{{1.0}, {{1.0, 0.0}}, {{1.0}}});
    try {
        log_likelihood(sparse, PairCounts(2, 1, {{0, 0, 1.0}, {1, 0, 1.0}}));
        FAIL("expected ZeroLikelihoodError");
    } catch (const ZeroLikelihoodError& e) {
        CHECK(std::string(e.what()).find("b.as:s") != std::string::npos);
    }
}

TEST_CASE("model construction enforces invariants") {
    auto vocab = make_vocab({"a.as:s"}, {"x", "y"});
    CHECK_THROWS_AS(LCModel(vocab, 1, {1.0}, {1.0}, {0.5, 0.3}), ValidationError);
    CHECK_THROWS_AS(LCModel(vocab, 1, {1.0}, {1.0}, {1.2, -0.2}), ValidationError);
    CHECK_THROWS_AS(LCModel(vocab, 1, {1.0}, {1.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(LCModel(vocab, 0, {}, {}, {}), ValidationError);
    CHECK_NOTHROW(LCModel(vocab, 1, {1.0}, {1.0}, {0.5, 0.5}));
}

TEST_CASE("property: conditionals normalize, posteriors sum to one, joints match enumeration") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto m = random_model(seed, seed % 2 == 0);
        const auto p = params_of(m);
        for (SymbolIndex v = 0; v < m.num_verbs(); ++v) {
            const bool has_marginal = verb_marginal(m, v) > 0.0;
            double total = 0.0;
            for (SymbolIndex n = 0; n < m.num_nouns(); ++n) {
                const double j = joint_prob(m, v, n);
                const double oracle = oracle_joint(p, v, n);
                CHECK(std::abs(j - oracle) <= 1e-14 * oracle);
                if (has_marginal) total += cond_noun_given_verb(m, v, n);
                if (j > 0.0) {
                    auto post = class_posterior(m, v, n);
                    double s = 0.0;
                    for (std::size_t c = 0; c < post.size(); ++c) {
                        s += post[c];
                        const double term = p.prior[c] * p.verb[c][v] * p.noun[c][n];
                        CHECK(post[c] == doctest::Approx(term / oracle).epsilon(1e-12));
                    }
                    CHECK(std::abs(s - 1.0) <= 1e-12);
                }
            }
            if (has_marginal) CHECK(std::abs(total - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("serialization format") {
    auto m = fixture_model();
    auto text = serialize_model(m);
    CHECK(text.rfind("LCMODEL 1 2 3 3\n", 0) == 0);
    CHECK(text.find("V 0 a.as:s\n") != std::string::npos);
    CHECK(text.find("N 2 z\n") != std::string::npos);
    CHECK(text.find("C 1 0.5\n") != std::string::npos);
    CHECK(text.find("VP 0 0 0.59999999999999998\n") != std::string::npos);
    CHECK(text.find("NP 1 2 0.69999999999999996\n") != std::string::npos);

    // zero parameters are omitted
    auto sparse = model_from(make_vocab({"a.as:s", "b.as:s"}, {"x"}), DenseParams{{1.0}, {{1.0, 0.0}}, {{1.0}}});
    auto sparse_text = serialize_model(sparse);
    CHECK(sparse_text.find("VP 0 1") == std::string::npos);
    CHECK(deserialize_model(sparse_text).same_parameters(sparse));
}

TEST_CASE("property: serialization round trip is exact") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto m = random_model(seed, seed % 3 == 0);
        auto text = serialize_model(m);
        auto back = deserialize_model(text);
        CHECK(back.same_parameters(m));
        CHECK(serialize_model(back) == text);
    }
}

TEST_CASE("deserialization rejects malformed input with line numbers") {
    const std::string good = serialize_model(fixture_model());
    auto expect_line = [](const std::string& text, std::size_t line) {
        try {
            deserialize_model(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
        }
    };
    expect_line("", 1);
    expect_line("LCMODEL 2 2 3 3\n", 1);
    expect_line("LCMODL 1 2 3 3\n", 1);
    expect_line("LCMODEL 1 0 3 3\n", 1);

    auto replace = [&](const std::string& from, const std::string& to) {
        auto copy = good;
        auto pos = copy.find(from);
        REQUIRE(pos != std::string::npos);
        copy.replace(pos, from.size(), to);
        return copy;
    };
    // class-0 verb row now sums to 0.8; the error points at its last VP row
    expect_line(replace("VP 0 0 0.59999999999999998", "VP 0 0 0.39999999999999998"), 12);
    expect_line(replace("V 1 b.as:s", "V 2 b.as:s"), 3);
    expect_line(replace("C 1 0.5", "C 1 0.7"), 9);
    expect_line(replace("NP 0 1", "XP 0 1"), 17);
    expect_line(replace("VP 0 0 0.59999999999999998", "VP 0 0 abc"), 10);
    expect_line(replace("N 1 y", "N 1 x"), 6);
    expect_line(good + "VP 0 0 0.1\n", 22);
    expect_line(good.substr(0, good.find("C 0")), 8);
}
