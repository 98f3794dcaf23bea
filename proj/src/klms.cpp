#include "okr/klms.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "okr/errors.hpp"

namespace okr {

namespace {

void require_variant(const KlmsState& state, KlmsVariant v, const char* op) {
    if (state.variant != v) {
        throw ArgumentError(std::string(op) + ": state variant is " + std::string(to_string(state.variant)) +
                            ", expected " + std::string(to_string(v)));
    }
}

void append(KlmsState& state, Input x, double weight) {
    state.dict.push_back(x);
    const Eigen::Index m = state.alpha.size();
    state.alpha.conservativeResize(m + 1);
    state.alpha[m] = weight;
}

double step_size(const KlmsState& state) {
    if (state.params.matched_eta) return 1.0 / (state.spec.noise_variance + kernel_diag(state.spec));
    return state.params.eta;
}

// True when no dictionary element is more coherent with x than μ0·σ_f².
bool coherence_admits(const KlmsState& state, const Vector& k) {
    if (k.size() == 0) return true;
    return k.maxCoeff() <= state.params.coherence_mu0 * state.spec.signal_variance;
}

}  // namespace

std::string_view to_string(KlmsVariant v) {
    switch (v) {
        case KlmsVariant::TypeI: return "klms";
        case KlmsVariant::Qklms: return "qklms";
        case KlmsVariant::Knlms: return "knlms";
        case KlmsVariant::Beta: return "beta";
    }
    return "unknown";
}

KlmsVariant parse_klms_variant(std::string_view s) {
    if (s == "klms") return KlmsVariant::TypeI;
    if (s == "qklms") return KlmsVariant::Qklms;
    if (s == "knlms") return KlmsVariant::Knlms;
    if (s == "beta") return KlmsVariant::Beta;
    throw ArgumentError("unknown KLMS variant '" + std::string(s) + "'");
}

KlmsState klms_init(const KernelSpec& spec, KlmsVariant variant, const KlmsParams& params) {
    spec.validate();
    if (!params.matched_eta && !(params.eta > 0.0)) throw ArgumentError("klms: eta must be > 0");
    if (!(params.beta >= 0.0)) throw ArgumentError("klms: beta must be >= 0");
    if (!(params.eps_reg >= 0.0)) throw ArgumentError("klms: eps_reg must be >= 0");
    if (!(params.quant_radius >= 0.0)) throw ArgumentError("klms: quant_radius must be >= 0");
    if (!(params.coherence_mu0 >= 0.0 && params.coherence_mu0 <= 1.0))
        throw ArgumentError("klms: coherence_mu0 must lie in [0, 1]");
    KlmsState s;
    s.spec = spec;
    s.variant = variant;
    s.params = params;
    return s;
}

double klms_predict(const KlmsState& state, Input x) {
    if (state.dict.empty()) return 0.0;
    return kernel_vector(state.spec, state.dict, x).dot(state.alpha);
}

KlmsStep klms_type1_update(KlmsState& state, Input x, double y) {
    require_variant(state, KlmsVariant::TypeI, "klms_type1_update");
    const Vector k = kernel_vector(state.spec, state.dict, x);
    KlmsStep st;
    st.y_hat = state.dict.empty() ? 0.0 : k.dot(state.alpha);
    st.e = y - st.y_hat;
    append(state, x, step_size(state) * st.e);
    st.grew = true;
    return st;
}

KlmsStep qklms_update(KlmsState& state, Input x, double y) {
    require_variant(state, KlmsVariant::Qklms, "qklms_update");
    const Vector k = kernel_vector(state.spec, state.dict, x);
    KlmsStep st;
    st.y_hat = state.dict.empty() ? 0.0 : k.dot(state.alpha);
    st.e = y - st.y_hat;

    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.dict.size(); ++i) {
        const double d2 = squared_distance(state.dict[i], x);
        if (d2 < best) {  // strict: smallest index wins ties
            best = d2;
            nearest = i;
        }
    }
    const double r = state.params.quant_radius;
    if (!state.dict.empty() && best <= r * r) {
        state.alpha[static_cast<Eigen::Index>(nearest)] += step_size(state) * st.e;
    } else {
        append(state, x, step_size(state) * st.e);
        st.grew = true;
    }
    return st;
}

KlmsStep knlms_update(KlmsState& state, Input x, double y) {
    require_variant(state, KlmsVariant::Knlms, "knlms_update");
    const Vector k = kernel_vector(state.spec, state.dict, x);
    const double kss = kernel_diag(state.spec);
    KlmsStep st;
    st.y_hat = state.dict.empty() ? 0.0 : k.dot(state.alpha);
    st.e = y - st.y_hat;
    const double eta = state.params.eta;
    const double eps = state.params.eps_reg;

    if (coherence_admits(state, k)) {
        const double coef = eta * st.e / (eps + kss * kss + k.squaredNorm());
        state.alpha += coef * k;
        append(state, x, coef * kss);
        st.grew = true;
    } else {
        const double denom = eps + k.squaredNorm();
        if (denom > 0.0) state.alpha += (eta * st.e / denom) * k;
    }
    return st;
}

KlmsStep beta_klms_update(KlmsState& state, Input x, double y) {
    require_variant(state, KlmsVariant::Beta, "beta_klms_update");
    const Vector k = kernel_vector(state.spec, state.dict, x);
    const double kss = kernel_diag(state.spec);
    const double beta = state.params.beta;
    KlmsStep st;
    st.y_hat = state.dict.empty() ? 0.0 : k.dot(state.alpha);
    st.e = y - st.y_hat;

    const double coef = st.e / (state.spec.noise_variance + kss + beta * k.squaredNorm());
    if (beta != 0.0) state.alpha += (beta * coef) * k;
    if (!state.params.beta_coherence || coherence_admits(state, k)) {
        append(state, x, coef);
        st.grew = true;
    }
    return st;
}

KlmsStep klms_update(KlmsState& state, Input x, double y) {
    switch (state.variant) {
        case KlmsVariant::TypeI: return klms_type1_update(state, x, y);
        case KlmsVariant::Qklms: return qklms_update(state, x, y);
        case KlmsVariant::Knlms: return knlms_update(state, x, y);
        case KlmsVariant::Beta: return beta_klms_update(state, x, y);
    }
    throw ArgumentError("klms_update: unknown variant");
}

BetaVariance beta_variance(const KlmsState& state, Input x) {
    require_variant(state, KlmsVariant::Beta, "beta_variance");
    const Vector k = kernel_vector(state.spec, state.dict, x);
    BetaVariance v;
    v.sigma_f2 = kernel_diag(state.spec) + state.params.beta * k.squaredNorm();
    v.sigma_y2 = state.spec.noise_variance + v.sigma_f2;
    return v;
}

Vector general_alpha_update_oracle(const GpState& gp, Input x, double y, const std::optional<Matrix>& sigma_override) {
    const Eigen::Index m = static_cast<Eigen::Index>(gp.size());
    const Matrix& sigma = sigma_override ? *sigma_override : gp.sigma;
    if (sigma.rows() != m || sigma.cols() != m || gp.q_inv.rows() != m || gp.mu.size() != m) {
        throw ArgumentError("general_alpha_update_oracle: size mismatch");
    }
    const Vector k = kernel_vector(gp.spec, gp.dict, x);
    const double kss = kernel_diag(gp.spec);
    const Vector alpha = gp.q_inv * gp.mu;
    const Vector q = gp.q_inv * k;
    const Vector spread = gp.q_inv * (sigma * q) - q;  // (QΣQ − Q) k
    const double e = y - k.dot(alpha);
    const double sigma_y2 = gp.spec.noise_variance + kss + gp.spec.jitter + k.dot(spread);

    Vector next(m + 1);
    next.head(m) = alpha + (e / sigma_y2) * spread;
    next[m] = e / sigma_y2;
    return next;
}

Matrix beta_covariance_model(const Matrix& K, double beta) {
    Matrix S = K * (beta * K + Matrix::Identity(K.rows(), K.cols()));
    return 0.5 * (S + S.transpose());
}

GpState beta_implied_gp_state(const KlmsState& state) {
    require_variant(state, KlmsVariant::Beta, "beta_implied_gp_state");
    GpState gp;
    gp.spec = state.spec;
    gp.dict = state.dict;
    if (state.dict.empty()) return gp;
    const Matrix K = gram_matrix(state.spec, state.dict);
    Eigen::LLT<Matrix> llt(K);
    if (llt.info() != Eigen::Success) throw NumericalError("beta_implied_gp_state: Gram matrix not positive definite");
    gp.q_inv = llt.solve(Matrix::Identity(K.rows(), K.cols()));
    gp.q_inv = 0.5 * (gp.q_inv + gp.q_inv.transpose()).eval();
    gp.mu = K * state.alpha;
    gp.sigma = beta_covariance_model(K, state.params.beta);
    return gp;
}

std::vector<double> klms_predict_batch(const KlmsState& state, const PointSet& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (state.dict.empty()) return out;
    const Matrix Ks = cross_kernel(state.spec, state.dict, points);
#pragma omp parallel for schedule(static)
    for (Eigen::Index r = 0; r < n; ++r) out[static_cast<std::size_t>(r)] = Ks.row(r).dot(state.alpha);
    return out;
}

}  // namespace okr
