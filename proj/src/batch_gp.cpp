#include "okr/batch_gp.hpp"

#include <cmath>
#include <string>

#include "okr/errors.hpp"

namespace okr {

double clamp_variance(double v, const char* where) {
    if (v >= 0.0) return v;
    if (v >= -kNegativeVarianceTolerance) return 0.0;
    throw NumericalError(std::string(where) + ": negative predictive variance " + std::to_string(v));
}

BatchFit batch_fit(const KernelSpec& spec, const Dictionary& dict, const Vector& y) {
    spec.validate();
    if (dict.empty()) throw ArgumentError("batch_fit: empty dictionary");
    if (static_cast<std::size_t>(y.size()) != dict.size()) {
        throw ArgumentError("batch_fit: " + std::to_string(y.size()) + " targets for " + std::to_string(dict.size()) +
                            " inputs");
    }

    Matrix A = gram_matrix(spec, dict);
    A.diagonal().array() += spec.noise_variance;

    BatchFit fit;
    fit.chol_.compute(A);
    double bump = 0.0;
    for (double extra = 1e-12; fit.chol_.info() != Eigen::Success; extra *= 10.0) {
        if (extra > 1e-6) throw NumericalError("batch_fit: Cholesky failed after jitter escalation");
        A.diagonal().array() += extra * spec.signal_variance - bump;
        bump = extra * spec.signal_variance;
        fit.chol_.compute(A);
    }

    fit.dict_ = dict;
    fit.targets_ = y;
    fit.spec_ = spec;
    fit.weights_ = fit.chol_.solve(y);
    return fit;
}

PredictiveDistribution batch_predict(const BatchFit& fit, Input x) {
    const Vector ks = kernel_vector(fit.spec_, fit.dict_, x);
    const double kss = kernel_diag(fit.spec_);
    PredictiveDistribution p;
    p.mean = ks.dot(fit.weights_);
    const Vector v = fit.chol_.matrixL().solve(ks);
    p.latent_var = clamp_variance(kss - v.squaredNorm(), "batch_predict");
    p.output_var = p.latent_var + fit.spec_.noise_variance;
    return p;
}

}  // namespace okr
