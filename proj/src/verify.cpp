#include "okr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "okr/batch_gp.hpp"
#include "okr/errors.hpp"
#include "okr/klms.hpp"
#include "okr/online_gp.hpp"

namespace okr {

namespace {

// Half a lengthscale keeps cond(K) moderate; the Q-based recursions lose
// roughly cond(K)·eps of accuracy and nearly coincident points blow that up.
constexpr double kSeparation = 0.5;

double max_abs_diff(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

KernelSpec unit_spec() {
    KernelSpec spec;
    spec.lengthscale = 1.0;
    spec.signal_variance = 1.0;
    spec.noise_variance = 0.1;
    spec.jitter = 1e-10;
    return spec;
}

PointSet uniform_grid(double lo, double hi, std::size_t n, std::size_t dim, std::uint64_t seed) {
    PointSet g(dim);
    if (dim == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
            g.push_back(Input(&x, 1));
        }
        return g;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(lo, hi);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x) v = uni(rng);
        g.push_back(as_input(x));
    }
    return g;
}

CheckResult online_batch_equivalence(const VerifyOptions& o) {
    CheckResult r{"online/batch GP equivalence", 0.0, o.tol.value_or(1e-8), false};
    const KernelSpec spec = unit_spec();
    for (std::size_t dim : {1u, 4u}) {
        const double w = dim == 1 ? 150.0 : 3.0;
        for (std::uint64_t s = 0; s < 5; ++s) {
            const RegressionSet data = random_stream(o.seed * 1000 + s + dim * 100, 200, dim, w, kSeparation);
            GpState gp = gp_init(spec, std::nullopt, 1e-12);
            Dictionary dict;
            for (std::size_t i = 0; i < data.size(); ++i) {
                gp_update(gp, data.inputs[i], data.targets[i]);
                dict.push_back(data.inputs[i]);
            }
            if (gp.size() != data.size()) {
                r.max_error = std::numeric_limits<double>::infinity();
                continue;
            }
            const BatchFit fit = batch_fit(spec, dict, Eigen::Map<const Vector>(data.targets.data(),
                                                                                  static_cast<Eigen::Index>(data.size())));
            const PointSet grid = uniform_grid(-w, w, 100, dim, s + 7);
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const auto on = gp_predict(gp, grid[g]);
                const auto ba = batch_predict(fit, grid[g]);
                r.max_error = std::max({r.max_error, std::abs(on.mean - ba.mean),
                                        std::abs(on.output_var - ba.output_var)});
            }
        }
    }
    r.pass = r.max_error < r.tolerance;
    return r;
}

// KRLS bridge and rank-1 inverse update share one 100-step stream.
std::pair<CheckResult, CheckResult> bridge_and_inverse(const VerifyOptions& o) {
    CheckResult bridge{"KRLS weights Q*mu vs batch solve", 0.0, o.tol.value_or(1e-8), false};
    CheckResult inverse{"rank-1 inverse update |QK - I|", 0.0, o.tol.value_or(1e-7), false};
    const KernelSpec spec = unit_spec();
    const RegressionSet data = random_stream(o.seed * 7919 + 3, 100, 2, 4.0, kSeparation);
    GpState gp = gp_init(spec, std::nullopt, 1e-12);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto out = gp_update(gp, data.inputs[i], data.targets[i]);
        if (!out.admitted) {
            bridge.max_error = inverse.max_error = std::numeric_limits<double>::infinity();
            break;
        }
        const BatchFit fit = batch_fit(spec, gp.dict, gp.targets);
        bridge.max_error = std::max(bridge.max_error, max_abs_diff(krls_weights(gp), fit.weights()));
        inverse.max_error = std::max(inverse.max_error, gp_diagnostics(gp).qk_identity_error);
    }
    bridge.pass = bridge.max_error < bridge.tolerance;
    inverse.pass = inverse.max_error < inverse.tolerance;
    return {bridge, inverse};
}

CheckResult identity_a(const VerifyOptions& o) {
    CheckResult r{"identity A: beta=0 vs KLMS(eta=1/(sn2+k))", 0.0, o.tol.value_or(1e-12), false};
    const KernelSpec spec = unit_spec();
    for (std::uint64_t s = 0; s < 3; ++s) {
        const RegressionSet data = random_stream(o.seed * 31 + s, 500, 2, 3.0);
        KlmsParams pb;
        pb.beta = 0.0;
        KlmsParams pk;
        pk.matched_eta = true;
        KlmsState b = klms_init(spec, KlmsVariant::Beta, pb);
        KlmsState k = klms_init(spec, KlmsVariant::TypeI, pk);
        for (std::size_t i = 0; i < data.size(); ++i) {
            beta_klms_update(b, data.inputs[i], data.targets[i]);
            klms_type1_update(k, data.inputs[i], data.targets[i]);
            r.max_error = std::max(r.max_error, max_abs_diff(b.alpha, k.alpha));
        }
    }
    r.pass = r.max_error < r.tolerance;
    return r;
}

CheckResult identity_b(const VerifyOptions& o) {
    CheckResult r{"identity B: beta=1 vs KNLMS(eta=1, eps=sn2)", 0.0, o.tol.value_or(1e-12), false};
    const KernelSpec spec = unit_spec();
    for (std::uint64_t s = 0; s < 3; ++s) {
        const RegressionSet data = random_stream(o.seed * 37 + s, 500, 2, 3.0);
        KlmsParams pb;
        pb.beta = 1.0;
        KlmsParams pn;
        pn.eta = 1.0;
        pn.eps_reg = spec.noise_variance + o.noise_mismatch;
        pn.coherence_mu0 = 1.0;
        KlmsState b = klms_init(spec, KlmsVariant::Beta, pb);
        KlmsState n = klms_init(spec, KlmsVariant::Knlms, pn);
        for (std::size_t i = 0; i < data.size(); ++i) {
            beta_klms_update(b, data.inputs[i], data.targets[i]);
            knlms_update(n, data.inputs[i], data.targets[i]);
            r.max_error = std::max(r.max_error, max_abs_diff(b.alpha, n.alpha));
        }
    }
    r.pass = r.max_error < r.tolerance;
    return r;
}

CheckResult identity_c(const VerifyOptions& o) {
    CheckResult r{"identity C: GP weight update with Sigma=K(bK+I)", 0.0, o.tol.value_or(1e-10), false};
    KernelSpec spec = unit_spec();
    spec.jitter = 0.0;
    for (double beta : {0.0, 0.25, 1.0, 2.0}) {
        const RegressionSet data = random_stream(o.seed * 41 + static_cast<std::uint64_t>(beta * 4), 30, 1, 30.0, kSeparation);
        KlmsParams p;
        p.beta = beta;
        KlmsState b = klms_init(spec, KlmsVariant::Beta, p);
        for (std::size_t i = 0; i < data.size(); ++i) {
            Vector oracle;
            if (b.dict.empty()) {
                oracle = general_alpha_update_oracle(gp_init(spec), data.inputs[i], data.targets[i]);
            } else {
                const GpState implied = beta_implied_gp_state(b);
                oracle = general_alpha_update_oracle(implied, data.inputs[i], data.targets[i], implied.sigma);
            }
            beta_klms_update(b, data.inputs[i], data.targets[i]);
            r.max_error = std::max(r.max_error, max_abs_diff(oracle, b.alpha));
        }
    }
    r.pass = r.max_error < r.tolerance;
    return r;
}

CheckResult covariance_model_identity(const VerifyOptions& o) {
    CheckResult r{"|Q K(bK+I) Q - Q - bI|", 0.0, o.tol.value_or(1e-8), false};
    KernelSpec spec = unit_spec();
    spec.jitter = 0.0;
    for (std::size_t m : {5u, 20u, 40u}) {
        const RegressionSet data = random_stream(o.seed * 43 + m, m, 1, 2.0 * static_cast<double>(m), kSeparation);
        Dictionary dict;
        for (std::size_t i = 0; i < m; ++i) dict.push_back(data.inputs[i]);
        const Matrix K = gram_matrix(spec, dict);
        const Matrix Q = K.llt().solve(Matrix::Identity(K.rows(), K.cols()));
        for (double beta : {0.0, 0.25, 1.0, 2.0}) {
            const Matrix S = beta_covariance_model(K, beta);
            const Matrix D = Q * S * Q - Q - beta * Matrix::Identity(K.rows(), K.cols());
            r.max_error = std::max(r.max_error, D.cwiseAbs().maxCoeff());
        }
    }
    r.pass = r.max_error < r.tolerance;
    return r;
}

}  // namespace

RegressionSet random_stream(std::uint64_t seed, std::size_t n, std::size_t dim, double half_width,
                            double min_separation) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
    std::uniform_real_distribution<double> uni(-half_width, half_width);
    std::normal_distribution<double> noise(0.0, 0.1);
    RegressionSet s;
    s.inputs = PointSet(dim);
    s.name = "random";
    s.seed = seed;
    const double min_sq = min_separation * min_separation;
    std::vector<double> x(dim);
    std::size_t rejected = 0;
    while (s.size() < n) {
        double sum = 0.0;
        for (auto& v : x) {
            v = uni(rng);
            sum += v;
        }
        bool close = false;
        for (std::size_t j = 0; j < s.size() && !close; ++j)
            close = squared_distance(s.inputs[j], as_input(x)) < min_sq;
        if (close) {
            if (++rejected > 1000 * n) throw ArgumentError("random_stream: domain too small for the separation");
            continue;
        }
        s.inputs.push_back(as_input(x));
        s.targets.push_back(std::sin(sum) + noise(rng));
    }
    return s;
}

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    std::vector<CheckResult> out;
    out.push_back(online_batch_equivalence(options));
    auto [bridge, inverse] = bridge_and_inverse(options);
    out.push_back(bridge);
    out.push_back(inverse);
    out.push_back(identity_a(options));
    out.push_back(identity_b(options));
    out.push_back(identity_c(options));
    out.push_back(covariance_model_identity(options));
    return out;
}

void print_check_table(std::ostream& os, const std::vector<CheckResult>& results) {
    char line[256];
    std::snprintf(line, sizeof line, "%-50s %12s %10s  %s\n", "check", "max_error", "tol", "result");
    os << line;
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "%-50s %12.3e %10.1e  %s\n", r.name.c_str(), r.max_error, r.tolerance,
                      r.pass ? "PASS" : "FAIL");
        os << line;
    }
}

}  // namespace okr
