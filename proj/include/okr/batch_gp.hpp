#pragma once

#include "okr/kernel.hpp"
#include "okr/types.hpp"

namespace okr {

/// Exact O(N³) GP regression / kernel ridge regression. Used as the reference
/// that the online models are checked against.
class BatchFit {
public:
    [[nodiscard]] const Dictionary& dict() const noexcept { return dict_; }
    [[nodiscard]] const Vector& targets() const noexcept { return targets_; }
    /// α = (K + σ_n² I)⁻¹ y
    [[nodiscard]] const Vector& weights() const noexcept { return weights_; }
    [[nodiscard]] const KernelSpec& spec() const noexcept { return spec_; }

    friend BatchFit batch_fit(const KernelSpec& spec, const Dictionary& dict, const Vector& y);
    friend PredictiveDistribution batch_predict(const BatchFit& fit, Input x);

private:
    Dictionary dict_;
    Vector targets_;
    Vector weights_;
    KernelSpec spec_;
    Eigen::LLT<Matrix> chol_;
};

/// Solves (K + σ_n² I) α = y by Cholesky. When the factorization fails the
/// diagonal is bumped by a growing multiple of σ_f² (up to 1e-6·σ_f²) before
/// giving up with NumericalError.
[[nodiscard]] BatchFit batch_fit(const KernelSpec& spec, const Dictionary& dict, const Vector& y);

/// Posterior predictive at x. Latent variances in (-1e-10, 0) are clamped to 0;
/// anything more negative throws NumericalError.
[[nodiscard]] PredictiveDistribution batch_predict(const BatchFit& fit, Input x);

/// Clamp threshold shared by every predictor.
inline constexpr double kNegativeVarianceTolerance = 1e-10;

/// Applies the clamp rule above; returns the clamped value.
[[nodiscard]] double clamp_variance(double v, const char* where);

}  // namespace okr
