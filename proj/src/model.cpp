#include "lcm/model.hpp"

#include "lcm/errors.hpp"
#include "lcm/simd/kernels.hpp"
#include "lcm/text_util.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace lcm {
namespace {

std::vector<double>& scratch(std::size_t n) {
    thread_local std::vector<double> buf;
    if (buf.size() < n) buf.resize(n);
    return buf;
}

void check_range(const LCModel& model, SymbolIndex verb, SymbolIndex noun) {
    if (verb >= model.num_verbs()) throw IndexError("verb index " + std::to_string(verb) + " out of range");
    if (noun >= model.num_nouns()) throw IndexError("noun index " + std::to_string(noun) + " out of range");
}

// Fills buf[0..C) with p(c) p(v|c) p(n|c) and returns their ordered sum.
double class_terms(const LCModel& model, SymbolIndex verb, SymbolIndex noun, double* buf) {
    const std::size_t k = model.num_classes();
    simd::kernels().product3(model.class_prior().data(), model.verb_row(verb).data(), model.noun_row(noun).data(), buf,
                             k);
    return simd::ordered_sum({buf, k});
}

void check_distribution(std::span<const double> values, std::size_t stride, std::size_t offset, const char* what,
                        std::size_t c) {
    double sum = 0.0;
    for (std::size_t i = offset; i < values.size(); i += stride) sum += values[i];
    if (!(std::abs(sum - 1.0) <= kNormTolerance)) {
        throw ValidationError(std::string(what) + " of class " + std::to_string(c) + " sums to " + format_real(sum));
    }
}

}  // namespace

LCModel::LCModel(std::shared_ptr<const Vocabulary> vocabulary, std::size_t num_classes, std::vector<double> class_prior,
                 std::vector<double> verb_table, std::vector<double> noun_table)
    : vocabulary_(std::move(vocabulary)),
      num_classes_(num_classes),
      class_prior_(std::move(class_prior)),
      verb_table_(std::move(verb_table)),
      noun_table_(std::move(noun_table)) {
    if (!vocabulary_) throw ValidationError("model without vocabulary");
    if (num_classes_ == 0) throw ValidationError("model needs at least one class");
    if (vocabulary_->verbs.empty() || vocabulary_->nouns.empty()) throw ValidationError("empty vocabulary");
    if (class_prior_.size() != num_classes_ || verb_table_.size() != num_verbs() * num_classes_ ||
        noun_table_.size() != num_nouns() * num_classes_) {
        throw ValidationError("parameter table shape does not match vocabulary and class count");
    }
    for (const auto* table : {&class_prior_, &verb_table_, &noun_table_}) {
        for (double p : *table) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("negative or non-finite parameter");
        }
    }
    check_distribution(class_prior_, 1, 0, "class prior", 0);
    for (std::size_t c = 0; c < num_classes_; ++c) {
        check_distribution(verb_table_, num_classes_, c, "verb distribution", c);
        check_distribution(noun_table_, num_classes_, c, "noun distribution", c);
    }
}

std::span<const double> LCModel::verb_row(SymbolIndex verb) const {
    if (verb >= num_verbs()) throw IndexError("verb index " + std::to_string(verb) + " out of range");
    return std::span<const double>(verb_table_).subspan(std::size_t{verb} * num_classes_, num_classes_);
}

std::span<const double> LCModel::noun_row(SymbolIndex noun) const {
    if (noun >= num_nouns()) throw IndexError("noun index " + std::to_string(noun) + " out of range");
    return std::span<const double>(noun_table_).subspan(std::size_t{noun} * num_classes_, num_classes_);
}

bool LCModel::same_parameters(const LCModel& other) const {
    return num_classes_ == other.num_classes_ && *vocabulary_ == *other.vocabulary_ &&
           class_prior_ == other.class_prior_ && verb_table_ == other.verb_table_ && noun_table_ == other.noun_table_;
}

double joint_prob(const LCModel& model, SymbolIndex verb, SymbolIndex noun) {
    check_range(model, verb, noun);
    return class_terms(model, verb, noun, scratch(model.num_classes()).data());
}

std::vector<double> class_posterior(const LCModel& model, SymbolIndex verb, SymbolIndex noun) {
    check_range(model, verb, noun);
    std::vector<double> out(model.num_classes());
    double total = class_terms(model, verb, noun, out.data());
    if (!(total > 0.0)) {
        throw UndefinedPosteriorError("p(v,n) = 0 for (" + model.vocabulary().verbs.at(verb) + ", " +
                                      model.vocabulary().nouns.at(noun) + ")");
    }
    for (double& p : out) p /= total;
    return out;
}

double verb_marginal(const LCModel& model, SymbolIndex verb) {
    const std::size_t k = model.num_classes();
    auto& buf = scratch(k);
    simd::kernels().product2(model.class_prior().data(), model.verb_row(verb).data(), buf.data(), k);
    return simd::ordered_sum({buf.data(), k});
}

double cond_noun_given_verb(const LCModel& model, SymbolIndex verb, SymbolIndex noun) {
    check_range(model, verb, noun);
    const std::size_t k = model.num_classes();
    auto& buf = scratch(2 * k);
    double* weights = buf.data();
    double* terms = buf.data() + k;
    simd::kernels().product2(model.class_prior().data(), model.verb_row(verb).data(), weights, k);
    double marginal = simd::ordered_sum({weights, k});
    if (!(marginal > 0.0)) {
        throw UndefinedConditionalError("p(v) = 0 for verb " + model.vocabulary().verbs.at(verb));
    }
    // Normalizing p(c|v) first keeps p(n|v) == p(n|c) exactly for one class.
    for (std::size_t c = 0; c < k; ++c) weights[c] /= marginal;
    simd::kernels().product2(weights, model.noun_row(noun).data(), terms, k);
    return simd::ordered_sum({terms, k});
}

double log_likelihood(const LCModel& model, const PairCounts& data) {
    if (data.num_verbs() > model.num_verbs() || data.num_nouns() > model.num_nouns()) {
        throw IndexError("data indices exceed model vocabulary");
    }
    auto& buf = scratch(model.num_classes());
    double total = 0.0;
    for (const auto& e : data.entries()) {
        double p = class_terms(model, e.verb, e.noun, buf.data());
        if (!(p > 0.0)) {
            throw ZeroLikelihoodError("observed pair (" + model.vocabulary().verbs.at(e.verb) + ", " +
                                      model.vocabulary().nouns.at(e.noun) + ") has zero probability");
        }
        total += e.count * std::log(p);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Text format

void write_model(std::ostream& out, const LCModel& model) {
    out << serialize_model(model);
}

std::string serialize_model(const LCModel& model) {
    const auto& vocab = model.vocabulary();
    const std::size_t k = model.num_classes();
    std::string out;
    out.reserve(64 * (vocab.verbs.size() + vocab.nouns.size()) * (k + 1));
    out += "LCMODEL 1 " + std::to_string(k) + ' ' + std::to_string(vocab.verbs.size()) + ' ' +
           std::to_string(vocab.nouns.size()) + '\n';
    for (std::size_t v = 0; v < vocab.verbs.size(); ++v) {
        out += "V " + std::to_string(v) + ' ' + vocab.verbs.symbols()[v] + '\n';
    }
    for (std::size_t n = 0; n < vocab.nouns.size(); ++n) {
        out += "N " + std::to_string(n) + ' ' + vocab.nouns.symbols()[n] + '\n';
    }
    for (std::size_t c = 0; c < k; ++c) {
        out += "C " + std::to_string(c) + ' ' + format_real(model.class_prior()[c]) + '\n';
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t v = 0; v < vocab.verbs.size(); ++v) {
            double p = model.verb_table()[v * k + c];
            if (p > 0.0) out += "VP " + std::to_string(c) + ' ' + std::to_string(v) + ' ' + format_real(p) + '\n';
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t n = 0; n < vocab.nouns.size(); ++n) {
            double p = model.noun_table()[n * k + c];
            if (p > 0.0) out += "NP " + std::to_string(c) + ' ' + std::to_string(n) + ' ' + format_real(p) + '\n';
        }
    }
    return out;
}

namespace {

class ModelParser {
public:
    LCModel parse(std::string_view text) {
        for_each_line(text, [&](std::string_view line, std::size_t line_no) { consume(line, line_no); });
        ++last_line_;
        if (!header_seen_) throw ParseError("missing LCMODEL header", last_line_);
        if (verbs_seen_ != num_verbs_ || nouns_seen_ != num_nouns_ || classes_seen_ != num_classes_) {
            throw ParseError("truncated model file", last_line_);
        }
        for (std::size_t c = 0; c < num_classes_; ++c) {
            check_sum(verb_table_, c, verb_last_line_[c], "verb");
            check_sum(noun_table_, c, noun_last_line_[c], "noun");
        }
        double prior_sum = simd::ordered_sum(prior_);
        if (!(std::abs(prior_sum - 1.0) <= kNormTolerance)) {
            throw ParseError("class prior sums to " + format_real(prior_sum), prior_last_line_);
        }
        auto vocab = std::make_shared<Vocabulary>(std::move(vocab_));
        try {
            return LCModel(std::move(vocab), num_classes_, std::move(prior_), std::move(verb_table_),
                           std::move(noun_table_));
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), last_line_);
        }
    }

private:
    void consume(std::string_view line, std::size_t line_no) {
        last_line_ = line_no;
        if (!header_seen_) {
            parse_header(line, line_no);
            return;
        }
        auto fields = split(line, ' ');
        const auto tag = fields[0];
        if (tag == "V" || tag == "N") {
            parse_symbol(line, tag == "V", line_no);
        } else if (tag == "C") {
            if (verbs_seen_ != num_verbs_ || nouns_seen_ != num_nouns_) throw ParseError("C row before symbols", line_no);
            if (fields.size() != 3) throw ParseError("expected 'C <class> <prob>'", line_no);
            auto c = index_field(fields[1], num_classes_, line_no);
            if (c != classes_seen_) throw ParseError("class rows out of order", line_no);
            prior_[c] = prob_field(fields[2], line_no);
            ++classes_seen_;
            prior_last_line_ = line_no;
        } else if (tag == "VP" || tag == "NP") {
            if (classes_seen_ != num_classes_) throw ParseError(std::string(tag) + " row before class rows", line_no);
            if (fields.size() != 4) throw ParseError("expected '" + std::string(tag) + " <class> <index> <prob>'", line_no);
            const bool verb = tag == "VP";
            auto c = index_field(fields[1], num_classes_, line_no);
            auto s = index_field(fields[2], verb ? num_verbs_ : num_nouns_, line_no);
            auto& table = verb ? verb_table_ : noun_table_;
            auto& seen = verb ? verb_set_ : noun_set_;
            auto cell = s * num_classes_ + c;
            if (seen[cell]) throw ParseError("duplicate parameter row", line_no);
            seen[cell] = true;
            table[cell] = prob_field(fields[3], line_no);
            (verb ? verb_last_line_ : noun_last_line_)[c] = line_no;
        } else {
            throw ParseError("unknown row tag '" + std::string(tag) + "'", line_no);
        }
    }

    void parse_header(std::string_view line, std::size_t line_no) {
        auto fields = split(line, ' ');
        if (fields.size() != 5 || fields[0] != "LCMODEL") throw ParseError("malformed LCMODEL header", line_no);
        unsigned long long version = 0, k = 0, nv = 0, nn = 0;
        if (!parse_unsigned(fields[1], version)) throw ParseError("malformed version", line_no);
        if (version != 1) throw ParseError("unsupported model version " + std::string(fields[1]), line_no);
        if (!parse_unsigned(fields[2], k) || !parse_unsigned(fields[3], nv) || !parse_unsigned(fields[4], nn) ||
            k == 0 || nv == 0 || nn == 0) {
            throw ParseError("malformed LCMODEL header", line_no);
        }
        header_seen_ = true;
        num_classes_ = k;
        num_verbs_ = nv;
        num_nouns_ = nn;
        prior_.assign(k, 0.0);
        verb_table_.assign(nv * k, 0.0);
        noun_table_.assign(nn * k, 0.0);
        verb_set_.assign(nv * k, false);
        noun_set_.assign(nn * k, false);
        verb_last_line_.assign(k, line_no);
        noun_last_line_.assign(k, line_no);
    }

    void parse_symbol(std::string_view line, bool verb, std::size_t line_no) {
        auto first = line.find(' ');
        auto second = first == std::string_view::npos ? first : line.find(' ', first + 1);
        if (second == std::string_view::npos) throw ParseError("expected '<tag> <index> <symbol>'", line_no);
        auto expected = verb ? verbs_seen_ : nouns_seen_;
        auto limit = verb ? num_verbs_ : num_nouns_;
        if (!verb && verbs_seen_ != num_verbs_) throw ParseError("N row before all V rows", line_no);
        auto index = index_field(line.substr(first + 1, second - first - 1), limit, line_no);
        if (index != expected) throw ParseError("symbol rows out of order", line_no);
        try {
            (verb ? vocab_.verbs : vocab_.nouns).add_new(line.substr(second + 1));
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line_no);
        }
        ++(verb ? verbs_seen_ : nouns_seen_);
    }

    std::size_t index_field(std::string_view text, std::size_t limit, std::size_t line_no) const {
        unsigned long long value = 0;
        if (!parse_unsigned(text, value) || value >= limit) {
            throw ParseError("index '" + std::string(text) + "' invalid or out of range", line_no);
        }
        return value;
    }

    double prob_field(std::string_view text, std::size_t line_no) const {
        double value = 0.0;
        if (!parse_real(text, value) || !(value >= 0.0) || !(value <= 1.0)) {
            throw ParseError("probability '" + std::string(text) + "' invalid", line_no);
        }
        return value;
    }

    void check_sum(const std::vector<double>& table, std::size_t c, std::size_t line_no, const char* what) const {
        double sum = 0.0;
        for (std::size_t i = c; i < table.size(); i += num_classes_) sum += table[i];
        if (!(std::abs(sum - 1.0) <= kNormTolerance)) {
            throw ParseError(std::string(what) + " distribution of class " + std::to_string(c) + " sums to " +
                                 format_real(sum),
                             line_no);
        }
    }

    bool header_seen_ = false;
    std::size_t num_classes_ = 0, num_verbs_ = 0, num_nouns_ = 0;
    std::size_t verbs_seen_ = 0, nouns_seen_ = 0, classes_seen_ = 0;
    std::size_t last_line_ = 0, prior_last_line_ = 0;
    Vocabulary vocab_;
    std::vector<double> prior_, verb_table_, noun_table_;
    std::vector<bool> verb_set_, noun_set_;
    std::vector<std::size_t> verb_last_line_, noun_last_line_;
};

}  // namespace

LCModel deserialize_model(std::string_view text) { return ModelParser().parse(text); }

LCModel read_model(std::istream& in) { return deserialize_model(read_stream(in)); }

}  // namespace lcm
