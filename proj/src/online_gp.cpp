#include "okr/online_gp.hpp"

#include <algorithm>
#include <string>

#include "okr/batch_gp.hpp"
#include "okr/errors.hpp"

namespace okr {

namespace {

constexpr double kSigmaDiagFloor = -1e-6;
constexpr Eigen::Index kPredictBlock = 64;

Matrix inverse_spd(const Matrix& A) {
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("Gram matrix is not positive definite");
    Matrix inv = llt.solve(Matrix::Identity(A.rows(), A.cols()));
    return 0.5 * (inv + inv.transpose());
}

void remove_index(Vector& v, Eigen::Index i) {
    const Eigen::Index n = v.size();
    v.segment(i, n - i - 1) = v.tail(n - i - 1).eval();
    v.conservativeResize(n - 1);
}

void remove_index(Matrix& M, Eigen::Index i) {
    const Eigen::Index n = M.rows();
    const Eigen::Index tail = n - i - 1;
    Matrix R(n - 1, n - 1);
    R.topLeftCorner(i, i) = M.topLeftCorner(i, i);
    R.topRightCorner(i, tail) = M.topRightCorner(i, tail);
    R.bottomLeftCorner(tail, i) = M.bottomLeftCorner(tail, i);
    R.bottomRightCorner(tail, tail) = M.bottomRightCorner(tail, tail);
    M = std::move(R);
}

}  // namespace

GpState gp_init(const KernelSpec& spec, std::optional<std::size_t> budget, double admission_threshold) {
    spec.validate();
    if (budget && *budget == 0) throw ArgumentError("gp_init: budget must be positive");
    if (!(admission_threshold >= 0.0)) throw ArgumentError("gp_init: admission threshold must be >= 0");
    GpState s;
    s.spec = spec;
    s.budget = budget;
    s.admission_threshold = admission_threshold;
    return s;
}

PredictiveDistribution gp_predict(const GpState& state, Input x) {
    const double kss = kernel_diag(state.spec);
    PredictiveDistribution p;
    if (state.dict.empty()) {
        p.latent_var = kss;
        p.output_var = kss + state.spec.noise_variance;
        return p;
    }
    const Vector k = kernel_vector(state.spec, state.dict, x);
    const Vector q = state.q_inv * k;
    p.mean = q.dot(state.mu);
    p.latent_var = clamp_variance(kss + q.dot(state.sigma * q) - k.dot(q), "gp_predict");
    p.output_var = p.latent_var + state.spec.noise_variance;
    return p;
}

GpUpdateScratch gp_compute_scratch(const GpState& state, Input x, double y) {
    GpUpdateScratch s;
    s.k_ss = kernel_diag(state.spec);
    s.k_vec = kernel_vector(state.spec, state.dict, x);
    s.q = state.q_inv * s.k_vec;
    s.h = state.sigma * s.q;
    s.gamma2 = s.k_ss + state.spec.jitter - s.k_vec.dot(s.q);
    s.sigma_f2 = s.gamma2 + s.q.dot(s.h);
    s.sigma_y2 = state.spec.noise_variance + s.sigma_f2;
    s.y_hat = s.q.dot(state.mu);
    s.e = y - s.y_hat;
    return s;
}

GpUpdateOutcome gp_update(GpState& state, Input x, double y) {
    GpUpdateOutcome out;
    out.scratch = gp_compute_scratch(state, x, y);
    const GpUpdateScratch& s = out.scratch;
    if (!(s.gamma2 > state.admission_threshold)) return out;
    if (s.sigma_y2 <= 0.0) throw NumericalError("gp_update: non-positive predictive variance");

    const Eigen::Index m = static_cast<Eigen::Index>(state.size());
    Vector hb(m + 1);
    hb << s.h, s.sigma_f2;

    // posterior mean
    state.mu.conservativeResize(m + 1);
    state.mu[m] = s.y_hat;
    state.mu += (s.e / s.sigma_y2) * hb;

    // posterior covariance
    Matrix S(m + 1, m + 1);
    S.topLeftCorner(m, m) = state.sigma;
    S.col(m).head(m) = s.h;
    S.row(m).head(m) = s.h.transpose();
    S(m, m) = s.sigma_f2;
    S.noalias() -= (hb / s.sigma_y2) * hb.transpose();
    state.sigma = 0.5 * (S + S.transpose());

    // rank-1 growth of the inverse Gram matrix
    Matrix Q(m + 1, m + 1);
    Q.topLeftCorner(m, m) = state.q_inv;
    Q.topLeftCorner(m, m).noalias() += (s.q / s.gamma2) * s.q.transpose();
    Q.col(m).head(m) = -s.q / s.gamma2;
    Q.row(m).head(m) = -s.q.transpose() / s.gamma2;
    Q(m, m) = 1.0 / s.gamma2;
    state.q_inv = std::move(Q);

    state.dict.push_back(x);
    state.targets.conservativeResize(m + 1);
    state.targets[m] = y;
    out.admitted = true;

    if (state.budget && state.size() > *state.budget) {
        state.dict.erase(0);
        remove_index(state.targets, 0);
        remove_index(state.mu, 0);
        remove_index(state.sigma, 0);
        state.q_inv = inverse_spd(gram_matrix(state.spec, state.dict));
        out.evicted = true;
    }

    if (state.sigma.diagonal().minCoeff() < kSigmaDiagFloor) {
        throw NumericalError("gp_update: posterior covariance lost positive semi-definiteness (check jitter/threshold)");
    }
    return out;
}

Vector krls_weights(const GpState& state) {
    if (state.dict.empty()) throw ArgumentError("krls_weights: empty state");
    return state.q_inv * state.mu;
}

std::vector<PredictiveDistribution> gp_predict_batch(const GpState& state, const PointSet& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    std::vector<PredictiveDistribution> out(static_cast<std::size_t>(n));
    const double kss = kernel_diag(state.spec);
    const double noise = state.spec.noise_variance;
    if (state.dict.empty()) {
        for (auto& p : out) p = {0.0, kss, kss + noise};
        return out;
    }
    if (points.dim() != state.dict.dim() && n > 0) throw ArgumentError("gp_predict_batch: dimension mismatch");

    const Vector alpha = state.q_inv * state.mu;
    const Matrix M = state.q_inv * state.sigma * state.q_inv - state.q_inv;
    const Matrix Ks = cross_kernel(state.spec, state.dict, points);
    const Eigen::Index blocks = (n + kPredictBlock - 1) / kPredictBlock;

    // Exceptions may not escape an OpenMP region; collect the first failure.
    bool failed = false;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index r0 = b * kPredictBlock;
        const Eigen::Index rows = std::min(kPredictBlock, n - r0);
        const auto kb = Ks.middleRows(r0, rows);
        const Vector means = kb * alpha;
        const Matrix KM = kb * M;
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double latent = kss + KM.row(r).dot(kb.row(r));
            auto& p = out[static_cast<std::size_t>(r0 + r)];
            p.mean = means[r];
            if (latent < -kNegativeVarianceTolerance) {
#pragma omp atomic write
                failed = true;
            }
            p.latent_var = latent < 0.0 ? 0.0 : latent;
            p.output_var = p.latent_var + noise;
        }
    }
    if (failed) throw NumericalError("gp_predict_batch: negative predictive variance");
    return out;
}

GpDiagnostics gp_diagnostics(const GpState& state) {
    GpDiagnostics d;
    if (state.dict.empty()) return d;
    d.sigma_asymmetry = (state.sigma - state.sigma.transpose()).cwiseAbs().maxCoeff();
    d.q_asymmetry = (state.q_inv - state.q_inv.transpose()).cwiseAbs().maxCoeff();
    const Matrix K = gram_matrix(state.spec, state.dict);
    const auto m = K.rows();
    d.qk_identity_error = (state.q_inv * K - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Matrix> es(state.sigma, Eigen::EigenvaluesOnly);
    d.sigma_min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

}  // namespace okr
