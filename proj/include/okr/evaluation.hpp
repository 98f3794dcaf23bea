#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "okr/datasets.hpp"
#include "okr/kernel.hpp"
#include "okr/regressor.hpp"

namespace okr {

/// 10·log10(mean((ŷ − y)²) / var(y)) with population variance. Returns -inf
/// when the error is exactly zero; throws ArgumentError on size mismatch,
/// empty input or constant targets.
[[nodiscard]] double nmse_db(std::span<const double> predictions, std::span<const double> targets);

struct CurvePoint {
    std::size_t step = 0;
    double nmse_db = 0.0;
};

struct LearningCurve {
    std::string algorithm;
    std::vector<CurvePoint> points;
};

/// Trains on `train` in order and scores the whole test set every
/// `eval_every` steps and after the final step.
[[nodiscard]] LearningCurve run_online_experiment(OnlineRegressor& model, const RegressionSet& train,
                                                  const RegressionSet& test, std::size_t eval_every);

struct CompareReplicate {
    std::uint64_t seed = 0;
    RegressionSet train;
    RegressionSet test;
};

/// Called with the trained model of each (algorithm, replicate) pair, possibly
/// from several threads at once.
using ModelObserver = std::function<void(std::size_t algorithm, std::size_t replicate, const OnlineRegressor&)>;

/// One learning curve per (algorithm, replicate), indexed [algorithm][replicate].
/// Replicates run in parallel; each owns its model.
[[nodiscard]] std::vector<std::vector<LearningCurve>> run_compare(const std::vector<AlgorithmConfig>& algorithms,
                                                                  const KernelSpec& spec,
                                                                  const std::vector<CompareReplicate>& replicates,
                                                                  std::size_t eval_every,
                                                                  const ModelObserver& on_trained = {});

/// Pointwise mean of nmse_db across replicates with identical step grids.
[[nodiscard]] LearningCurve average_curves(const std::vector<LearningCurve>& curves);

struct ReconvergenceCurve {
    std::string algorithm;
    std::vector<double> mean_sq_error;     // e_t² averaged over seeds
    std::vector<double> smoothed_db;       // 10·log10 of the trailing moving average
};

struct ReconvergenceResult {
    std::size_t switch_at = 0;
    std::size_t n_seeds = 0;
    std::size_t smoothing = 1;
    std::vector<ReconvergenceCurve> curves;
};

struct ReconvergenceConfig {
    SwitchScenario scenario;          // channels are redrawn per seed; other fields are kept
    std::size_t channel_length = 4;
    ChannelModel channel_model = ChannelModel::Gaussian;
    std::size_t n_seeds = 5;
    std::uint64_t base_seed = 1;
    std::size_t smoothing = 20;
};

[[nodiscard]] ReconvergenceResult run_reconvergence(const ReconvergenceConfig& config,
                                                    const std::vector<AlgorithmConfig>& algorithms,
                                                    const KernelSpec& spec);

/// Mean of `values` over the closed step range [first, last].
[[nodiscard]] double window_mean(std::span<const double> values, std::size_t first, std::size_t last);

struct UncertaintyTrace {
    std::string algorithm;
    std::size_t prefix = 0;
    std::vector<double> grid;
    std::vector<double> mean;   // the GP mean, shared by all traces of a prefix
    std::vector<double> std;    // σ_y
};

/// For each prefix size, fits the exact online GP and β-KLMS with β = 0 and
/// β = 1 on the first `prefix` points of a 1-D set and evaluates σ_y on the grid.
[[nodiscard]] std::vector<UncertaintyTrace> run_uncertainty_trace(const RegressionSet& data,
                                                                  const std::vector<std::size_t>& prefixes,
                                                                  const std::vector<double>& grid,
                                                                  const KernelSpec& spec);

void write_learning_curves_csv(std::ostream& os, const std::vector<LearningCurve>& curves);
void write_reconvergence_csv(std::ostream& os, const ReconvergenceResult& result);
void write_uncertainty_csv(std::ostream& os, const std::vector<UncertaintyTrace>& traces);

}  // namespace okr
