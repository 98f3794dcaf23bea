#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "okr/types.hpp"

namespace okr {

struct RegressionSet {
    PointSet inputs;
    std::vector<double> targets;
    std::string name;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t size() const noexcept { return targets.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return inputs.dim(); }
    [[nodiscard]] RegressionSet slice(std::size_t first, std::size_t count) const;
};

/// Noiseless target of the kinematics-like generator: Σ_j cos(π Σ_{i≤j} x_i).
[[nodiscard]] double kinematics_like_target(Input x);

/// Inputs uniform in [-1, 1]^d, targets kinematics_like_target + N(0, 0.05²).
/// Returns (train, test) drawn from one stream, so the sets do not share points.
[[nodiscard]] std::pair<RegressionSet, RegressionSet> gen_kinematics_like(std::uint64_t seed, std::size_t n_train,
                                                                          std::size_t n_test, std::size_t d = 8);

/// 1-D toy set for uncertainty plots: x uniform in [lo, hi], y = sinc(x) + N(0, noise_std²).
[[nodiscard]] RegressionSet gen_sinc_1d(std::uint64_t seed, std::size_t n, double noise_std = 0.1, double lo = -3.0,
                                        double hi = 3.0);

enum class Nonlinearity { TanhSat };

struct SwitchScenario {
    std::size_t n_total = 1000;
    std::size_t switch_at = 500;
    std::vector<double> channel_a;
    std::vector<double> channel_b;
    Nonlinearity nonlinearity = Nonlinearity::TanhSat;
    double noise_std = 0.01;
    std::size_t embedding_dim = 4;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class ChannelModel {
    Gaussian,      // i.i.d. standard normal taps
    MinimumPhase,  // monic polynomial with random roots of modulus in [0.5, 0.95]
};

[[nodiscard]] ChannelModel parse_channel_model(std::string_view s);

/// Scenario for one replicate: two random channels of length `channel_length`
/// scaled to unit energy, drawn from `seed`.
[[nodiscard]] SwitchScenario random_switch_scenario(std::uint64_t seed, std::size_t channel_length = 4,
                                                    ChannelModel model = ChannelModel::Gaussian);

struct SwitchSeries {
    RegressionSet stream;                 // x_t = [v_{t-1}, ..., v_{t-E}], y_t = v_t
    std::vector<double> source;           // s_t for t = 0 .. n_total-1
    std::vector<unsigned char> regime;    // 0 while channel_a drives the output, 1 for channel_b
};

/// White Gaussian source -> FIR channel -> tanh -> additive noise. channel_b
/// applies from t = switch_at onward; history before t = 0 uses channel_a.
[[nodiscard]] SwitchSeries gen_switch_series(const SwitchScenario& scenario);

/// Reads rows of d inputs followed by one target. Empty lines are skipped.
/// Throws IoError when the file cannot be opened and ParseError (with the
/// 1-based line number) on malformed rows.
[[nodiscard]] RegressionSet load_csv(const std::filesystem::path& path, std::size_t d, bool skip_header = false);

/// Standardizes input columns of both sets with the first set's mean/std.
void standardize_inputs(RegressionSet& reference, RegressionSet& other);

}  // namespace okr
