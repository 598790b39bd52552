#include "lcm/cli.hpp"

#include "lcm/corpus_io.hpp"
#include "lcm/errors.hpp"
#include "lcm/evaluation.hpp"
#include "lcm/model.hpp"
#include "lcm/reports.hpp"
#include "lcm/slot_labeler.hpp"
#include "lcm/text_util.hpp"
#include "lcm/trainer.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <ostream>
#include <sstream>

namespace lcm {
namespace {

constexpr const char* kFormats = R"(File formats (UTF-8, LF line endings, fields separated by TAB):
  pairs      verb_functor  noun  [count]        e.g. increase.as:s  number  3
             verb functors are lemma.frame:slot with frame:slot one of as:s, aso:s, aso:o;
             count defaults to 1, duplicate pairs are summed, '#' starts a comment line
  subjects   verb  noun  [count]                 (label-intrans input)
  triples    verb  subject  object  [count]      (label-trans input)
  eval       <prefix>.train.tsv / .test.tsv: verb_functor noun count;
             <prefix>.triples.tsv: verb_functor noun verb_functor_prime
  model      'LCMODEL 1 <classes> <verbs> <nouns>', then 'V <i> <verb>' and 'N <i> <noun>' rows,
             'C <c> <p(c)>', 'VP <c> <v> <p(v|c)>', 'NP <c> <n> <p(n|c)>' (zero rows omitted),
             probabilities with 17 significant digits
  trace      iteration  log_likelihood
  curves     num_classes  iterations  seed  metric  value   (seed = mean/min/max on aggregate rows)
  lexicon    verb  slot_signature  label  prob  filler:score;filler:score;...
Exit status: 0 success, 1 usage error, 2 data or validation error.)";

LCModel load_model(const std::string& path) {
    try {
        return deserialize_model(read_file(path));
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

PairCorpus load_pairs(const std::string& path) {
    try {
        return read_pairs(read_file(path));
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    for (auto part : split(text, ',')) out.emplace_back(part);
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) {
        unsigned long long value = 0;
        if (!parse_unsigned(item, value)) throw CLI::ValidationError(std::string(what), "'" + item + "' is not a non-negative integer");
        out.push_back(static_cast<T>(value));
    }
    return out;
}

struct Options {
    // shared
    std::string pairs, model, out, samples, triples, trace, truth, subjects_out, report;
    std::uint64_t seed = 0;
    std::size_t classes = 1;
    std::size_t iterations = 50;
    std::size_t threads = 1;
    double tolerance = 0.0;
    // grid
    std::string seeds_list = "0", classes_list = "1", iterations_list = "50";
    // evaluation
    std::size_t test_pairs = 3000;
    double freq_min = 30, freq_max = 3000;
    std::size_t sample_size = 1000;
    double threshold = 0.0;
    // labeling / reports
    std::size_t top = 10;
    std::string class_index;
    std::size_t top_verbs = 30, top_nouns = 20;
    // synthetic data
    std::size_t verbs_per_class = 80, nouns_per_class = 200, tokens = 50000;
    std::size_t subject_verbs = 2, subject_tokens = 200;
    double noise = 0.003;
};

int run_train(const Options& o, std::ostream& out) {
    auto corpus = load_pairs(o.pairs);
    TrainConfig config;
    config.num_classes = o.classes;
    config.iterations = o.iterations;
    config.seed = o.seed;
    config.likelihood_tolerance = o.tolerance;
    config.threads = o.threads;
    auto result = train(config, corpus.counts, corpus.vocabulary);
    write_file_atomic(o.out, serialize_model(result.model));
    if (!o.trace.empty()) write_file_atomic(o.trace, result.trace.to_tsv());
    out << "iterations\t" << result.trace.iterations_run << '\n';
    out << "log_likelihood\t" << format_real(result.trace.log_likelihood.back()) << '\n';
    for (auto [t, c] : result.trace.degenerate_classes) {
        out << "warning\tclass " << c << " lost all posterior mass at iteration " << t << '\n';
    }
    return kExitOk;
}

int run_grid(const Options& o, std::ostream& out) {
    auto corpus = load_pairs(o.pairs);
    auto seeds = parse_list<std::uint64_t>(o.seeds_list, "--seeds");
    auto classes = parse_list<std::size_t>(o.classes_list, "--classes");
    auto iterations = parse_list<std::size_t>(o.iterations_list, "--iterations");
    std::vector<EvalTriple> triples;
    if (!o.triples.empty()) triples = parse_triples(read_file(o.triples), *corpus.vocabulary);

    std::filesystem::create_directories(o.out);
    auto cells = grid_train(corpus.counts, corpus.vocabulary, seeds, classes, iterations, o.threads);
    std::vector<MetricRow> rows;
    std::size_t failed = 0;
    for (const auto& cell : cells) {
        const auto& c = cell.config;
        if (cell.failed) {
            ++failed;
            out << "failed\t" << c.num_classes << '\t' << c.iterations << '\t' << c.seed << '\t' << cell.error << '\n';
            continue;
        }
        const std::string stem = "model_c" + std::to_string(c.num_classes) + "_i" + std::to_string(c.iterations) +
                                 "_s" + std::to_string(c.seed);
        write_file_atomic(std::filesystem::path(o.out) / (stem + ".lcm"), serialize_model(*cell.model));
        write_file_atomic(std::filesystem::path(o.out) / (stem + ".trace.tsv"), cell.trace.to_tsv());
        rows.push_back({c.num_classes, c.iterations, c.seed, "log_likelihood", cell.trace.log_likelihood.back()});
        if (!triples.empty()) {
            rows.push_back({c.num_classes, c.iterations, c.seed, "accuracy", pseudo_accuracy(*cell.model, triples)});
        }
        rows.push_back({c.num_classes, c.iterations, c.seed, "smoothing_power",
                        smoothing_power(*cell.model, o.sample_size, o.seed, o.threshold)});
    }
    if (!rows.empty()) write_file_atomic(std::filesystem::path(o.out) / "curves.tsv", emit_curves(rows));
    out << "cells\t" << cells.size() << "\nfailed\t" << failed << '\n';
    return failed == cells.size() ? kExitData : kExitOk;
}

template <typename Samples>
int write_lexicon(const Options& o, const LCModel& model, const Samples& samples, std::ostream& out) {
    LabelOptions options;
    options.iterations = o.iterations;
    auto labeled = label_many(model, std::span(samples), options, o.top, o.threads);
    std::string tsv, report;
    std::size_t failed = 0;
    for (const auto& r : labeled) {
        if (!r.entry) {
            ++failed;
            out << "failed\t" << r.verb << '\t' << r.error << '\n';
            continue;
        }
        tsv += lexicon_tsv_row(*r.entry, model.vocabulary());
        report += lexicon_report(*r.entry, model.vocabulary()) + '\n';
    }
    write_file_atomic(o.out, tsv);
    if (!o.report.empty()) write_file_atomic(o.report, report);
    out << "labeled\t" << labeled.size() - failed << "\nfailed\t" << failed << '\n';
    return kExitOk;
}

int run_label_intrans(const Options& o, std::ostream& out) {
    auto model = load_model(o.model);
    auto samples = read_noun_samples(read_file(o.samples), model.vocabulary().nouns);
    return write_lexicon(o, model, samples, out);
}

int run_label_trans(const Options& o, std::ostream& out) {
    auto model = load_model(o.model);
    auto samples = read_pair_samples(read_file(o.samples), model.vocabulary().nouns);
    return write_lexicon(o, model, samples, out);
}

int run_eval_pseudo(const Options& o, std::ostream& out) {
    if (!o.model.empty()) {
        if (o.triples.empty()) throw CLI::ValidationError("--triples", "scoring needs --triples");
        auto model = load_model(o.model);
        std::size_t skipped = 0;
        auto triples = parse_triples(read_file(o.triples), model.vocabulary(), &skipped);
        const double accuracy = pseudo_accuracy(model, triples);
        out << "accuracy\t" << format_real(accuracy) << '\n';
        out << "triples\t" << triples.size() << '\n';
        if (skipped) out << "skipped\t" << skipped << '\n';
        if (!o.out.empty()) {
            MetricRow row{model.num_classes(), o.iterations, o.seed, "accuracy", accuracy};
            write_file_atomic(o.out, emit_curves(std::span(&row, 1)));
        }
        return kExitOk;
    }
    if (o.pairs.empty() || o.out.empty()) {
        throw CLI::ValidationError("eval-pseudo", "give --model and --triples to score, or --pairs and --out to build");
    }
    auto corpus = load_pairs(o.pairs);
    PseudoCorpusOptions options;
    options.test_pair_count = o.test_pairs;
    options.freq_min = o.freq_min;
    options.freq_max = o.freq_max;
    options.seed = o.seed;
    auto split = build_pseudo_corpus(corpus.counts, options);
    write_split(o.out, split, *corpus.vocabulary);
    double test_tokens = 0.0;
    for (const auto& e : split.test_pairs) test_tokens += e.count;
    out << "train_tokens\t" << format_real(split.train_counts.total_tokens()) << '\n'
        << "test_pairs\t" << split.test_pairs.size() << '\n'
        << "test_tokens\t" << format_real(test_tokens) << '\n'
        << "triples\t" << split.triples.size() << '\n'
        << "dropped_no_distractor\t" << split.dropped_no_distractor << '\n'
        << "filtered_by_frequency\t" << split.filtered_by_frequency << '\n'
        << "rejected_candidates\t" << split.rejected_candidates << '\n';
    return kExitOk;
}

int run_eval_smooth(const Options& o, std::ostream& out) {
    auto model = load_model(o.model);
    out << "smoothing_power\t" << format_real(smoothing_power(model, o.sample_size, o.seed, o.threshold)) << '\n';
    if (!o.pairs.empty()) {
        auto corpus = load_pairs(o.pairs);
        auto [counts, dropped] = remap_counts(corpus.counts, *corpus.vocabulary, model.vocabulary());
        out << "type_coverage\t" << format_real(type_coverage_baseline(counts, model.vocabulary())) << '\n';
    }
    return kExitOk;
}

int run_report_class(const Options& o, std::ostream& out) {
    auto model = load_model(o.model);
    PairCounts counts(model.num_verbs(), model.num_nouns(), {});
    if (!o.pairs.empty()) {
        auto corpus = load_pairs(o.pairs);
        counts = remap_counts(corpus.counts, *corpus.vocabulary, model.vocabulary()).first;
    }
    std::vector<std::size_t> classes;
    if (o.class_index.empty()) {
        for (std::size_t c = 0; c < model.num_classes(); ++c) classes.push_back(c);
    } else {
        classes = parse_list<std::size_t>(o.class_index, "--class");
    }
    std::string text;
    for (auto c : classes) {
        if (!text.empty()) text += '\n';
        text += render_class_report(class_report(model, counts, c, o.top_verbs, o.top_nouns), model.vocabulary());
    }
    if (o.out.empty()) {
        out << text;
    } else {
        write_file_atomic(o.out, text);
    }
    return kExitOk;
}

int run_gen_synth(const Options& o, std::ostream& out) {
    auto spec = make_block_spec(o.classes, o.verbs_per_class, o.nouns_per_class, o.noise, o.tokens, o.seed);
    auto corpus = generate_planted(spec);
    write_file_atomic(o.out, write_pairs(*corpus.vocabulary, corpus.counts));
    if (!o.truth.empty()) write_file_atomic(o.truth, serialize_model(corpus.truth));
    if (!o.subjects_out.empty()) {
        auto subjects = generate_planted_subjects(spec, o.subject_verbs, o.subject_tokens, o.seed + 1);
        write_file_atomic(o.subjects_out, noun_samples_to_tsv(subjects.samples, corpus.vocabulary->nouns));
    }
    out << "tokens\t" << format_real(corpus.counts.total_tokens()) << "\ntypes\t" << corpus.counts.type_count() << '\n';
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Latent-class clustering of verb-noun pairs, evaluation and slot labeling", "lcm"};
    app.footer(kFormats);
    app.require_subcommand(1);
    Options o;

    auto* train = app.add_subcommand("train", "Estimate a latent-class model by EM");
    train->add_option("--pairs", o.pairs, "Training pairs TSV")->required();
    train->add_option("--classes", o.classes, "Number of latent classes")->check(CLI::PositiveNumber);
    train->add_option("--iterations", o.iterations, "EM iterations")->check(CLI::PositiveNumber);
    train->add_option("--seed", o.seed, "Initialization seed");
    train->add_option("--tolerance", o.tolerance, "Stop when the relative likelihood gain drops below this")
        ->check(CLI::NonNegativeNumber);
    train->add_option("--threads", o.threads, "E-step workers (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    train->add_option("--out", o.out, "Model file to write")->required();
    train->add_option("--trace", o.trace, "Write the likelihood trace TSV here");

    auto* grid = app.add_subcommand("grid", "Train every seed x classes x iterations combination");
    grid->add_option("--pairs", o.pairs, "Training pairs TSV")->required();
    grid->add_option("--seeds", o.seeds_list, "Comma-separated seeds");
    grid->add_option("--classes", o.classes_list, "Comma-separated class counts");
    grid->add_option("--iterations", o.iterations_list, "Comma-separated iteration counts");
    grid->add_option("--triples", o.triples, "Evaluation triples; adds accuracy rows to curves.tsv");
    grid->add_option("--samples", o.sample_size, "Smoothing-power sample size")->check(CLI::PositiveNumber);
    grid->add_option("--seed", o.seed, "Smoothing-power sampling seed");
    grid->add_option("--threshold", o.threshold, "Positivity threshold for smoothing power")
        ->check(CLI::NonNegativeNumber);
    grid->add_option("--threads", o.threads, "E-step workers")->check(CLI::PositiveNumber);
    grid->add_option("--out", o.out, "Output directory (models, traces, curves.tsv)")->required();

    auto add_label_options = [&](CLI::App* cmd, const char* samples_help) {
        cmd->add_option("--model", o.model, "Model file")->required();
        cmd->add_option("--samples", o.samples, samples_help)->required();
        cmd->add_option("--iterations", o.iterations, "Labeling EM iterations")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", o.seed, "Unused with the default uniform start");
        cmd->add_option("--top", o.top, "Fillers listed per entry");
        cmd->add_option("--threads", o.threads, "Verbs labeled in parallel")->check(CLI::PositiveNumber);
        cmd->add_option("--out", o.out, "Lexicon TSV to write")->required();
        cmd->add_option("--report", o.report, "Human-readable lexicon report to write");
    };
    auto* label_intrans = app.add_subcommand("label-intrans", "Label intransitive subject slots");
    add_label_options(label_intrans, "Subject sample TSV (verb, noun, count)");
    auto* label_trans = app.add_subcommand("label-trans", "Label transitive subject/object slot pairs");
    add_label_options(label_trans, "Argument sample TSV (verb, subject, object, count)");

    auto* eval_pseudo = app.add_subcommand("eval-pseudo", "Build a pseudo-disambiguation split or score a model");
    eval_pseudo->add_option("--pairs", o.pairs, "Corpus to split (build mode)");
    eval_pseudo->add_option("--test-pairs", o.test_pairs, "Pair types cut for testing")->check(CLI::PositiveNumber);
    eval_pseudo->add_option("--freq-min", o.freq_min, "Minimum corpus frequency of v, v', n");
    eval_pseudo->add_option("--freq-max", o.freq_max, "Maximum corpus frequency of v, v', n");
    eval_pseudo->add_option("--seed", o.seed, "Sampling seed (build) or seed tag (score)");
    eval_pseudo->add_option("--model", o.model, "Model to score (score mode)");
    eval_pseudo->add_option("--triples", o.triples, "Triples TSV (score mode)");
    eval_pseudo->add_option("--iterations", o.iterations, "Iteration tag for the metric row (score mode)");
    eval_pseudo->add_option("--out", o.out, "Split prefix (build) or metric TSV (score)");

    auto* eval_smooth = app.add_subcommand("eval-smooth", "Estimate smoothing power by sampling V x N");
    eval_smooth->add_option("--model", o.model, "Model file")->required();
    eval_smooth->add_option("--samples", o.sample_size, "Number of sampled pairs")->check(CLI::PositiveNumber);
    eval_smooth->add_option("--seed", o.seed, "Sampling seed");
    eval_smooth->add_option("--threshold", o.threshold, "Count p(v,n) > threshold as positive")
        ->check(CLI::NonNegativeNumber);
    eval_smooth->add_option("--pairs", o.pairs, "Training pairs; also prints the type-coverage baseline");

    auto* report_class = app.add_subcommand("report-class", "Print class matrices");
    report_class->add_option("--model", o.model, "Model file")->required();
    report_class->add_option("--pairs", o.pairs, "Training pairs for the seen-pair dots");
    report_class->add_option("--class", o.class_index, "Comma-separated classes (default all)");
    report_class->add_option("--top-verbs", o.top_verbs, "Verbs per class");
    report_class->add_option("--top-nouns", o.top_nouns, "Nouns per class");
    report_class->add_option("--out", o.out, "Write here instead of stdout");

    auto* gen_synth = app.add_subcommand("gen-synth", "Generate a planted block-structured pair corpus");
    gen_synth->add_option("--classes", o.classes, "Planted classes")->check(CLI::PositiveNumber);
    gen_synth->add_option("--verbs-per-class", o.verbs_per_class, "Verbs owned by each class")
        ->check(CLI::PositiveNumber);
    gen_synth->add_option("--nouns-per-class", o.nouns_per_class, "Nouns owned by each class")
        ->check(CLI::PositiveNumber);
    gen_synth->add_option("--noise", o.noise, "Mass each class spreads outside its block")->check(CLI::Range(0.0, 0.999));
    gen_synth->add_option("--tokens", o.tokens, "Tokens to draw")->check(CLI::PositiveNumber);
    gen_synth->add_option("--seed", o.seed, "Sampling seed");
    gen_synth->add_option("--out", o.out, "Pairs TSV to write")->required();
    gen_synth->add_option("--truth", o.truth, "Write the generating model here");
    gen_synth->add_option("--subjects-out", o.subjects_out, "Also write planted subject samples (seed + 1)");
    gen_synth->add_option("--subject-verbs", o.subject_verbs, "Subject-sample verbs per class");
    gen_synth->add_option("--subject-tokens", o.subject_tokens, "Tokens per subject-sample verb");

    std::vector<const char*> argv{"lcm"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        const auto selected = app.get_subcommands();
        err << (selected.empty() ? app.help() : selected.back()->help());
        return kExitUsage;
    }

    try {
        if (train->parsed()) return run_train(o, out);
        if (grid->parsed()) return run_grid(o, out);
        if (label_intrans->parsed()) return run_label_intrans(o, out);
        if (label_trans->parsed()) return run_label_trans(o, out);
        if (eval_pseudo->parsed()) return run_eval_pseudo(o, out);
        if (eval_smooth->parsed()) return run_eval_smooth(o, out);
        if (report_class->parsed()) return run_report_class(o, out);
        if (gen_synth->parsed()) return run_gen_synth(o, out);
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace lcm
