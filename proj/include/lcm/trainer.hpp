#pragma once

#include "lcm/model.hpp"
#include "lcm/pair_counts.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lcm {

enum class InitScheme { uniform_random };

struct TrainConfig {
    std::size_t num_classes = 1;
    std::size_t iterations = 1;
    std::uint64_t seed = 0;
    InitScheme init_scheme = InitScheme::uniform_random;
    /// Stop once the relative likelihood gain of a step falls below this.
    /// 0 runs every iteration.
    double likelihood_tolerance = 0.0;
    /// Workers for the E-step. Results do not depend on this value.
    std::size_t threads = 1;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainTrace {
    /// L(theta^(0)) ... L(theta^(T)).
    std::vector<double> log_likelihood;
    std::size_t iterations_run = 0;
    /// Classes whose posterior mass vanished in some step, with the step index.
    std::vector<std::pair<std::size_t, std::size_t>> degenerate_classes;

    /// `iteration<TAB>log_likelihood` rows, header first.
    std::string to_tsv() const;
};

/// Strictly positive random start: every distribution is a vector of
/// uniform(0.1, 1.0) draws, normalized. Draw order is the class prior, then
/// each class's verb distribution, then each class's noun distribution.
LCModel init_model(const TrainConfig& config, std::shared_ptr<const Vocabulary> vocabulary);

/// E-step sufficient statistics. Tables are symbol-major like LCModel.
struct ExpectedCounts {
    std::size_t num_classes = 0;
    /// sum over y in {v} x N of f(y) p(c|y), |V| x |C|.
    std::vector<double> verb;
    /// sum over y in V x {n} of f(y) p(c|y), |N| x |C|.
    std::vector<double> noun;
    /// sum over y of f(y) p(c|y).
    std::vector<double> class_mass;
    /// L of the model the statistics were taken under.
    double log_likelihood = 0.0;
    double total_tokens = 0.0;
};

/// One fused pass over the observed types. The pass is split into a fixed
/// number of partitions that depends only on the data, and partial sums are
/// merged in partition order, so the result is identical for any `threads`.
/// Throws TrainingDegeneracyError on an observed pair with p(y) = 0.
ExpectedCounts expected_counts(const LCModel& model, const PairCounts& data, std::size_t threads = 1);

struct EmStepResult {
    LCModel model;
    /// L of the input model.
    double log_likelihood_before;
    /// Classes with zero posterior mass; their conditionals were kept.
    std::vector<std::size_t> degenerate_classes;
};

/// Re-estimation from expected counts. The class prior is normalized by the
/// total token count.
EmStepResult maximize(const LCModel& model, const ExpectedCounts& counts);

EmStepResult em_step_detailed(const LCModel& model, const PairCounts& data, std::size_t threads = 1);

/// theta' = M(theta).
LCModel em_step(const LCModel& model, const PairCounts& data);

struct TrainResult {
    LCModel model;
    TrainTrace trace;
};

/// Called with (t, theta^(t)) for t = 0 (after init) and after every step.
using IterationObserver = std::function<void(std::size_t, const LCModel&)>;

/// init_model followed by `iterations` EM steps (fewer with early stopping).
/// Errors from a step are rethrown as TrainingDegeneracyError carrying the
/// iteration index.
TrainResult train(const TrainConfig& config, const PairCounts& data, std::shared_ptr<const Vocabulary> vocabulary,
                  const IterationObserver& observer = {});

struct GridCell {
    TrainConfig config;
    std::optional<LCModel> model;
    TrainTrace trace;
    bool failed = false;
    std::string error;
};

/// Trains the seed x classes x iterations product, seed-major then classes
/// then iterations, in the order given. A failing cell is flagged and the rest
/// of the grid still runs. Cells sharing (seed, classes) come from one training
/// run snapshotted at each requested iteration count, which yields exactly the
/// models independent runs would.
std::vector<GridCell> grid_train(const PairCounts& data, std::shared_ptr<const Vocabulary> vocabulary,
                                 const std::vector<std::uint64_t>& seeds, const std::vector<std::size_t>& class_counts,
                                 const std::vector<std::size_t>& iteration_counts, std::size_t threads = 1);

}  // namespace lcm
