#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "okr/errors.hpp"
#include "okr/klms.hpp"
#include "okr/verify.hpp"

using namespace okr;

namespace {

KernelSpec spec01() {
    KernelSpec s;
    s.noise_variance = 0.1;
    s.jitter = 0.0;
    return s;
}

const std::vector<double> kZero{0.0};

KlmsParams with_eta(double eta) {
    KlmsParams p;
    p.eta = eta;
    return p;
}

KlmsParams with_beta(double beta) {
    KlmsParams p;
    p.beta = beta;
    return p;
}

double max_diff(const Vector& a, const Vector& b) {
    REQUIRE(a.size() == b.size());
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("prediction is a weighted kernel sum") {
    KlmsState s = klms_init(spec01(), KlmsVariant::TypeI, with_eta(0.5));
    CHECK(klms_predict(s, as_input(kZero)) == 0.0);

    s.dict.push_back(as_input(kZero));
    s.alpha = Vector::Constant(1, 2.0);
    CHECK(klms_predict(s, as_input(kZero)) == 2.0);

    const std::vector<double> r2{std::sqrt(2.0)};
    s.dict.push_back(as_input(r2));
    s.alpha = Vector::Ones(2);
    CHECK(klms_predict(s, as_input(kZero)) == doctest::Approx(1.367879).epsilon(1e-6));
}

TEST_CASE("type-I KLMS appends eta * e") {
    KlmsState s = klms_init(spec01(), KlmsVariant::TypeI, with_eta(0.5));
    const auto st = klms_type1_update(s, as_input(kZero), 1.0);
    CHECK(st.e == 1.0);
    CHECK(st.grew);
    REQUIRE(s.alpha.size() == 1);
    CHECK(s.alpha(0) == 0.5);

    // zero error appends a zero weight and leaves predictions alone
    const std::vector<double> x{0.3};
    const double before = klms_predict(s, as_input(x));
    klms_type1_update(s, as_input(x), before);
    CHECK(s.alpha(1) == 0.0);
    CHECK(klms_predict(s, as_input(x)) == before);
}

TEST_CASE("QKLMS merges into the nearest point") {
    KlmsParams p = with_eta(0.5);
    p.quant_radius = 0.0;
    KlmsState s = klms_init(spec01(), KlmsVariant::Qklms, p);
    qklms_update(s, as_input(kZero), 1.0);
    CHECK(s.alpha(0) == 0.5);
    const auto st = qklms_update(s, as_input(kZero), 1.0);
    CHECK(st.e == 0.5);
    CHECK_FALSE(st.grew);
    REQUIRE(s.alpha.size() == 1);
    CHECK(s.alpha(0) == 0.75);

    // radius 0: anything but an exact duplicate grows
    const std::vector<double> near{1e-9};
    CHECK(qklms_update(s, as_input(near), 1.0).grew);
}

TEST_CASE("QKLMS ties go to the smallest index") {
    KlmsParams p = with_eta(1.0);
    p.quant_radius = 1.0;
    KlmsState s = klms_init(spec01(), KlmsVariant::Qklms, p);
    const std::vector<double> a{-0.5}, b{0.5};
    s.dict.push_back(as_input(a));
    s.dict.push_back(as_input(b));
    s.alpha = Vector::Zero(2);
    qklms_update(s, as_input(kZero), 1.0);
    CHECK(s.alpha(0) == 1.0);
    CHECK(s.alpha(1) == 0.0);
}

TEST_CASE("QKLMS dictionary stays separated by the radius") {
    KlmsParams p = with_eta(0.3);
    p.quant_radius = 0.4;
    KlmsState s = klms_init(spec01(), KlmsVariant::Qklms, p);
    const RegressionSet data = random_stream(3, 400, 2, 2.0);
    for (std::size_t i = 0; i < data.size(); ++i) qklms_update(s, data.inputs[i], data.targets[i]);
    CHECK(s.size() < 400);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            CHECK(squared_distance(s.dict[i], s.dict[j]) > p.quant_radius * p.quant_radius);
}

TEST_CASE("KNLMS first step by hand") {
    KlmsParams p = with_eta(1.0);
    p.eps_reg = 0.1;
    KlmsState s = klms_init(spec01(), KlmsVariant::Knlms, p);
    const auto st = knlms_update(s, as_input(kZero), 1.0);
    CHECK(st.e == 1.0);
    CHECK(s.alpha(0) == doctest::Approx(0.909091).epsilon(1e-6));
}

TEST_CASE("KNLMS coherence gate") {
    KlmsParams p = with_eta(1.0);
    p.eps_reg = 0.1;
    p.coherence_mu0 = 0.5;
    KlmsState s = klms_init(spec01(), KlmsVariant::Knlms, p);
    knlms_update(s, as_input(kZero), 1.0);
    const double a0 = s.alpha(0);
    // k = exp(-0.005) > 0.5: restricted update, no growth
    const std::vector<double> close{0.1};
    const auto st = knlms_update(s, as_input(close), 1.0);
    CHECK_FALSE(st.grew);
    const double k = std::exp(-0.005);
    CHECK(s.alpha(0) == doctest::Approx(a0 + st.e * k / (0.1 + k * k)).epsilon(1e-12));
    // far point: admitted
    const std::vector<double> far{5.0};
    CHECK(knlms_update(s, as_input(far), 1.0).grew);
}

TEST_CASE("beta-KLMS first step equals the exact GP weight for any beta") {
    for (double beta : {0.0, 0.5, 1.0, 3.0}) {
        KlmsState s = klms_init(spec01(), KlmsVariant::Beta, with_beta(beta));
        beta_klms_update(s, as_input(kZero), 1.0);
        CHECK(s.alpha(0) == doctest::Approx(1.0 / 1.1).epsilon(1e-12));
    }
}

TEST_CASE("beta = 1 second step by hand") {
    KlmsState s = klms_init(spec01(), KlmsVariant::Beta, with_beta(1.0));
    beta_klms_update(s, as_input(kZero), 1.0);
    const auto st = beta_klms_update(s, as_input(kZero), 1.0);
    CHECK(st.y_hat == doctest::Approx(0.909091).epsilon(1e-6));
    CHECK(st.e == doctest::Approx(0.090909).epsilon(1e-5));
    const double inc = (1.0 - 1.0 / 1.1) / 2.1;
    CHECK(inc == doctest::Approx(0.043290).epsilon(1e-5));
    CHECK(s.alpha(0) == doctest::Approx(1.0 / 1.1 + inc).epsilon(1e-12));
    CHECK(s.alpha(1) == doctest::Approx(inc).epsilon(1e-12));
}

TEST_CASE("beta = 0 leaves old weights untouched") {
    KlmsState s = klms_init(spec01(), KlmsVariant::Beta, with_beta(0.0));
    const RegressionSet data = random_stream(9, 50, 2, 2.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vector before = s.alpha;
        const auto st = beta_klms_update(s, data.inputs[i], data.targets[i]);
        CHECK(s.alpha.head(before.size()) == before);
        CHECK(s.alpha(s.alpha.size() - 1) == doctest::Approx(st.e / 1.1).epsilon(1e-14));
    }
}

TEST_CASE("identity A: beta = 0 equals KLMS with matched step") {
    KernelSpec spec = spec01();
    spec.signal_variance = 1.7;
    spec.lengthscale = 0.8;
    KlmsParams pk;
    pk.matched_eta = true;
    for (std::uint64_t seed : {1u, 2u}) {
        KlmsState b = klms_init(spec, KlmsVariant::Beta, with_beta(0.0));
        KlmsState k = klms_init(spec, KlmsVariant::TypeI, pk);
        const RegressionSet data = random_stream(seed, 300, 3, 2.0);
        for (std::size_t i = 0; i < data.size(); ++i) {
            beta_klms_update(b, data.inputs[i], data.targets[i]);
            klms_type1_update(k, data.inputs[i], data.targets[i]);
            CHECK(max_diff(b.alpha, k.alpha) < 1e-12);
        }
    }
}

TEST_CASE("identity B: beta = 1 equals KNLMS on a unit-diagonal kernel") {
    const KernelSpec spec = spec01();
    KlmsParams pn = with_eta(1.0);
    pn.eps_reg = spec.noise_variance;
    pn.coherence_mu0 = 1.0;
    KlmsState b = klms_init(spec, KlmsVariant::Beta, with_beta(1.0));
    KlmsState n = klms_init(spec, KlmsVariant::Knlms, pn);
    const RegressionSet data = random_stream(12, 300, 2, 3.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        beta_klms_update(b, data.inputs[i], data.targets[i]);
        knlms_update(n, data.inputs[i], data.targets[i]);
        CHECK(max_diff(b.alpha, n.alpha) < 1e-12);
    }

    // a noise mismatch breaks the pairing
    KlmsState b2 = klms_init(spec, KlmsVariant::Beta, with_beta(1.0));
    pn.eps_reg = spec.noise_variance + 0.05;
    KlmsState n2 = klms_init(spec, KlmsVariant::Knlms, pn);
    for (std::size_t i = 0; i < 20; ++i) {
        beta_klms_update(b2, data.inputs[i], data.targets[i]);
        knlms_update(n2, data.inputs[i], data.targets[i]);
    }
    CHECK(max_diff(b2.alpha, n2.alpha) > 1e-6);
}

TEST_CASE("identity C: the general GP weight update reproduces beta-KLMS") {
    KernelSpec spec = spec01();
    for (double beta : {0.0, 0.25, 1.0, 2.0}) {
        KlmsState s = klms_init(spec, KlmsVariant::Beta, with_beta(beta));
        const RegressionSet data = random_stream(70 + static_cast<std::uint64_t>(4 * beta), 30, 1, 30.0, 0.5);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const GpState implied = beta_implied_gp_state(s);
            const Vector oracle = s.dict.empty()
                                      ? general_alpha_update_oracle(gp_init(spec), data.inputs[i], data.targets[i])
                                      : general_alpha_update_oracle(implied, data.inputs[i], data.targets[i],
                                                                    implied.sigma);
            beta_klms_update(s, data.inputs[i], data.targets[i]);
            CHECK(max_diff(oracle, s.alpha) < 1e-10);
        }
    }
}

TEST_CASE("the oracle with the true GP covariance is the exact GP update") {
    KernelSpec spec = spec01();
    spec.jitter = 1e-10;
    const RegressionSet data = random_stream(80, 40, 2, 3.0, 0.5);
    GpState gp = gp_init(spec, std::nullopt, 1e-12);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vector oracle = general_alpha_update_oracle(gp, data.inputs[i], data.targets[i]);
        REQUIRE(gp_update(gp, data.inputs[i], data.targets[i]).admitted);
        CHECK(max_diff(oracle, krls_weights(gp)) < 1e-9);
    }
}

TEST_CASE("covariance model identity Q K(bK+I) Q - Q = bI") {
    KernelSpec spec = spec01();
    for (std::size_t m : {3u, 15u, 40u}) {
        const RegressionSet data = random_stream(m, m, 1, 2.0 * static_cast<double>(m), 0.5);
        Dictionary d;
        for (std::size_t i = 0; i < m; ++i) d.push_back(data.inputs[i]);
        const Matrix K = gram_matrix(spec, d);
        const Matrix Q = K.inverse();
        for (double beta : {0.0, 0.25, 1.0, 2.0}) {
            const Matrix D = Q * beta_covariance_model(K, beta) * Q - Q;
            CHECK((D - beta * Matrix::Identity(K.rows(), K.cols())).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("beta variance") {
    KlmsState s0 = klms_init(spec01(), KlmsVariant::Beta, with_beta(0.0));
    KlmsState s1 = klms_init(spec01(), KlmsVariant::Beta, with_beta(1.0));
    CHECK(beta_variance(s1, as_input(kZero)).sigma_f2 == 1.0);
    beta_klms_update(s1, as_input(kZero), 1.0);
    CHECK(beta_variance(s1, as_input(kZero)).sigma_f2 == doctest::Approx(2.0));
    CHECK(beta_variance(s1, as_input(kZero)).sigma_y2 == doctest::Approx(2.1));

    const RegressionSet data = random_stream(15, 60, 1, 4.0);
    const std::vector<double> probe{0.7};
    double prev1 = beta_variance(s1, as_input(probe)).sigma_f2;
    for (std::size_t i = 0; i < data.size(); ++i) {
        beta_klms_update(s0, data.inputs[i], data.targets[i]);
        beta_klms_update(s1, data.inputs[i], data.targets[i]);
        CHECK(beta_variance(s0, as_input(probe)).sigma_f2 == 1.0);
        const double v1 = beta_variance(s1, as_input(probe)).sigma_f2;
        CHECK(v1 >= prev1);
        prev1 = v1;
    }
}

TEST_CASE("batch prediction matches the serial reference") {
    KlmsState s = klms_init(spec01(), KlmsVariant::Beta, with_beta(0.5));
    const RegressionSet data = random_stream(16, 120, 3, 2.0);
    for (std::size_t i = 0; i < data.size(); ++i) beta_klms_update(s, data.inputs[i], data.targets[i]);
    const RegressionSet probe = random_stream(17, 200, 3, 2.0);
    const auto a = klms_predict_batch(s, probe.inputs);
    const auto b = serial::klms_predict_batch(s, probe.inputs);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a[i] - b[i]) < 1e-12);
        CHECK(std::abs(a[i] - klms_predict(s, probe.inputs[i])) < 1e-12);
    }
}

TEST_CASE("variant names and errors") {
    for (auto v : {KlmsVariant::TypeI, KlmsVariant::Qklms, KlmsVariant::Knlms, KlmsVariant::Beta})
        CHECK(parse_klms_variant(to_string(v)) == v);
    CHECK_THROWS_AS((void)parse_klms_variant("rls"), ArgumentError);

    KlmsState s = klms_init(spec01(), KlmsVariant::TypeI, with_eta(0.5));
    CHECK_THROWS_AS(beta_klms_update(s, as_input(kZero), 1.0), ArgumentError);
    CHECK_THROWS_AS((void)beta_variance(s, as_input(kZero)), ArgumentError);
    CHECK_THROWS_AS((void)klms_init(spec01(), KlmsVariant::TypeI, with_eta(0.0)), ArgumentError);
    CHECK_THROWS_AS((void)klms_init(spec01(), KlmsVariant::Beta, with_beta(-1.0)), ArgumentError);
    KlmsParams p;
    p.coherence_mu0 = 1.5;
    CHECK_THROWS_AS((void)klms_init(spec01(), KlmsVariant::Knlms, p), ArgumentError);
}
