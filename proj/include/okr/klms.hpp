#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "okr/kernel.hpp"
#include "okr/online_gp.hpp"
#include "okr/types.hpp"

namespace okr {

enum class KlmsVariant { TypeI, Qklms, Knlms, Beta };

[[nodiscard]] std::string_view to_string(KlmsVariant v);
[[nodiscard]] KlmsVariant parse_klms_variant(std::string_view s);

struct KlmsParams {
    double eta = 0.5;             // learning rate (TypeI, Qklms, Knlms)
    bool matched_eta = false;     // TypeI/Qklms: use η_t = 1/(σ_n² + k(x,x)) instead of eta
    double beta = 0.0;            // Beta variant
    double eps_reg = 1e-4;        // Knlms regularizer ε
    double quant_radius = 0.0;    // Qklms quantization size
    double coherence_mu0 = 1.0;   // Knlms (and optionally Beta) admission, as a fraction of σ_f²
    bool beta_coherence = false;  // Beta: gate growth with the coherence rule
};

/// Kernel weights over a dictionary; prediction is αᵀ k(dict, x).
struct KlmsState {
    KernelSpec spec;
    KlmsVariant variant = KlmsVariant::Beta;
    KlmsParams params;
    Dictionary dict;
    Vector alpha;

    [[nodiscard]] std::size_t size() const noexcept { return dict.size(); }
};

/// What an update saw and did.
struct KlmsStep {
    double y_hat = 0.0;
    double e = 0.0;
    bool grew = false;
};

[[nodiscard]] KlmsState klms_init(const KernelSpec& spec, KlmsVariant variant, const KlmsParams& params);

[[nodiscard]] double klms_predict(const KlmsState& state, Input x);

// Variant-specific updates. Each throws ArgumentError when called on a state of
// another variant.
KlmsStep klms_type1_update(KlmsState& state, Input x, double y);
KlmsStep qklms_update(KlmsState& state, Input x, double y);
KlmsStep knlms_update(KlmsState& state, Input x, double y);
KlmsStep beta_klms_update(KlmsState& state, Input x, double y);

/// Dispatches on state.variant.
KlmsStep klms_update(KlmsState& state, Input x, double y);

struct BetaVariance {
    double sigma_f2 = 0.0;
    double sigma_y2 = 0.0;
};

/// σ_f² = k(x,x) + β‖k‖², the variance implied by Σ_t = K_t(βK_t + I).
[[nodiscard]] BetaVariance beta_variance(const KlmsState& state, Input x);

/// Exact GP weight update α_{t+1} = Q_{t+1} μ_{t+1} written in terms of α_t = Q_t μ_t,
/// evaluated with the state's Σ_t or with `sigma_override`.
[[nodiscard]] Vector general_alpha_update_oracle(const GpState& gp_state, Input x, double y,
                                                 const std::optional<Matrix>& sigma_override = std::nullopt);

/// GP state implied by a β-KLMS model: Q = K⁻¹, μ = Kα, Σ = K(βK + I).
[[nodiscard]] GpState beta_implied_gp_state(const KlmsState& state);

/// Σ = K(βK + I), symmetrized.
[[nodiscard]] Matrix beta_covariance_model(const Matrix& K, double beta);

[[nodiscard]] std::vector<double> klms_predict_batch(const KlmsState& state, const PointSet& points);

namespace serial {

[[nodiscard]] std::vector<double> klms_predict_batch(const KlmsState& state, const PointSet& points);

}  // namespace serial

}  // namespace okr
