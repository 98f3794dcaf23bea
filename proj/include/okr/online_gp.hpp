#pragma once

#include <cstddef>
#include <optional>

#include "okr/kernel.hpp"
#include "okr/types.hpp"

namespace okr {

/// Online GP model {D_t, μ_t, Σ_t, Q_t}.
///
/// `mu` and `sigma` are the posterior mean and covariance of the latent function
/// at the dictionary inputs; `q_inv` is the inverse of the jittered Gram matrix
/// K_t + jitter·I. `targets` is kept for diagnostics only and is never read by
/// the update equations.
struct GpState {
    KernelSpec spec;
    Dictionary dict;
    Vector targets;
    Vector mu;
    Matrix sigma;
    Matrix q_inv;
    std::optional<std::size_t> budget;
    double admission_threshold = 1e-8;

    [[nodiscard]] std::size_t size() const noexcept { return dict.size(); }
};

/// Per-step intermediates of the sequential update.
struct GpUpdateScratch {
    Vector k_vec;          // k_{t+1}
    double k_ss = 0.0;     // k(x, x)
    Vector q;              // Q_t k
    Vector h;              // Σ_t q
    double gamma2 = 0.0;   // k_ss + jitter − kᵀ Q_t k
    double sigma_f2 = 0.0; // γ² + qᵀh
    double sigma_y2 = 0.0; // σ_n² + σ_f²
    double y_hat = 0.0;    // qᵀ μ_t
    double e = 0.0;        // y − ŷ
};

struct GpUpdateOutcome {
    GpUpdateScratch scratch;
    bool admitted = false;
    bool evicted = false;
};

[[nodiscard]] GpState gp_init(const KernelSpec& spec, std::optional<std::size_t> budget = std::nullopt,
                              double admission_threshold = 1e-8);

/// Predictive mean kᵀQμ and variance σ_n² + k** + kᵀ(QΣQ − Q)k.
[[nodiscard]] PredictiveDistribution gp_predict(const GpState& state, Input x);

[[nodiscard]] GpUpdateScratch gp_compute_scratch(const GpState& state, Input x, double y);

/// Admits (x, y) when γ² exceeds the admission threshold, otherwise leaves the
/// state untouched. With a budget, the oldest point is evicted after admission
/// and Q is recomputed from the reduced Gram matrix.
GpUpdateOutcome gp_update(GpState& state, Input x, double y);

/// α_t = Q_t μ_t, the kernel ridge weights of the data seen so far.
[[nodiscard]] Vector krls_weights(const GpState& state);

/// Predictions for many points at once; rows are processed in fixed-size
/// blocks in parallel, so results do not depend on the thread count.
[[nodiscard]] std::vector<PredictiveDistribution> gp_predict_batch(const GpState& state, const PointSet& points);

/// Largest deviations from the structural invariants, for tests and self-checks.
struct GpDiagnostics {
    double sigma_asymmetry = 0.0;
    double q_asymmetry = 0.0;
    double qk_identity_error = 0.0;   // ‖Q (K + jitter·I) − I‖_max
    double sigma_min_eigenvalue = 0.0;
};

[[nodiscard]] GpDiagnostics gp_diagnostics(const GpState& state);

namespace serial {

/// One gp_predict per point.
[[nodiscard]] std::vector<PredictiveDistribution> gp_predict_batch(const GpState& state, const PointSet& points);

}  // namespace serial

}  // namespace okr
