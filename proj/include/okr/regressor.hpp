#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "okr/klms.hpp"
#include "okr/online_gp.hpp"

namespace okr {

/// Common surface of every online model the experiment runners drive.
class OnlineRegressor {
public:
    virtual ~OnlineRegressor() = default;

    [[nodiscard]] virtual const std::string& name() const = 0;
    [[nodiscard]] virtual PredictiveDistribution predict(Input x) const = 0;
    [[nodiscard]] virtual std::vector<double> predict_mean_batch(const PointSet& points) const = 0;
    /// Learns from (x, y); returns the error of the prediction made before the update.
    virtual double update(Input x, double y) = 0;
    [[nodiscard]] virtual std::size_t dictionary_size() const = 0;
    /// FNV-1a over the full model state.
    [[nodiscard]] virtual std::uint64_t state_hash() const = 0;
    virtual void write_snapshot(std::ostream& os) const = 0;
};

class GpRegressor final : public OnlineRegressor {
public:
    GpRegressor(std::string name, GpState state) : name_(std::move(name)), state_(std::move(state)) {}

    const std::string& name() const override { return name_; }
    PredictiveDistribution predict(Input x) const override { return gp_predict(state_, x); }
    std::vector<double> predict_mean_batch(const PointSet& points) const override;
    double update(Input x, double y) override { return gp_update(state_, x, y).scratch.e; }
    std::size_t dictionary_size() const override { return state_.size(); }
    std::uint64_t state_hash() const override;
    void write_snapshot(std::ostream& os) const override;

    [[nodiscard]] const GpState& state() const noexcept { return state_; }

private:
    std::string name_;
    GpState state_;
};

/// KLMS-family model. predict() reports the variance of the covariance model
/// each variant implies: β = 0 for KLMS/QKLMS, β = 1 for KNLMS, the configured
/// β for β-KLMS.
class KlmsRegressor final : public OnlineRegressor {
public:
    KlmsRegressor(std::string name, KlmsState state) : name_(std::move(name)), state_(std::move(state)) {}

    const std::string& name() const override { return name_; }
    PredictiveDistribution predict(Input x) const override;
    std::vector<double> predict_mean_batch(const PointSet& points) const override {
        return klms_predict_batch(state_, points);
    }
    double update(Input x, double y) override { return klms_update(state_, x, y).e; }
    std::size_t dictionary_size() const override { return state_.size(); }
    std::uint64_t state_hash() const override;
    void write_snapshot(std::ostream& os) const override;

    [[nodiscard]] const KlmsState& state() const noexcept { return state_; }

private:
    std::string name_;
    KlmsState state_;
};

/// One algorithm entry of an experiment.
struct AlgorithmConfig {
    std::string label;                 // how the algorithm is named in outputs
    std::string kind;                  // gp | klms | qklms | knlms | beta
    KlmsParams klms;
    std::optional<std::size_t> budget; // gp only
    double admission_threshold = 1e-8; // gp only
};

/// Values used when a token does not carry its own parameter. Unset optionals
/// fall back to the per-algorithm defaults documented in parse_algorithm.
struct AlgorithmDefaults {
    std::optional<double> eta;
    double beta = 1.0;
    std::optional<double> eps_reg;
    double quant_radius = 0.1;
    double coherence_mu0 = 1.0;
    std::optional<std::size_t> budget;
    double admission_threshold = 1e-8;
};

/// Parses tokens such as `gp`, `gp:200` (budget), `beta:0.5`, `klms`,
/// `klms:0.2` (η), `qklms:0.3` (quantization radius), `knlms:0.9` (coherence μ0).
///
/// Without --eta, KLMS/QKLMS use the matched step η = 1/(σ_n² + k(x,x)) and
/// KNLMS uses η = 1; KNLMS uses ε = σ_n² unless eps_reg is given.
[[nodiscard]] AlgorithmConfig parse_algorithm(std::string_view token, const AlgorithmDefaults& defaults,
                                              const KernelSpec& spec);

[[nodiscard]] std::vector<AlgorithmConfig> parse_algorithm_list(std::string_view list,
                                                                const AlgorithmDefaults& defaults,
                                                                const KernelSpec& spec);

[[nodiscard]] std::unique_ptr<OnlineRegressor> make_regressor(const AlgorithmConfig& config, const KernelSpec& spec);

}  // namespace okr
