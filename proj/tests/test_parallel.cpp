#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "okr/kernel.hpp"
#include "okr/klms.hpp"
#include "okr/online_gp.hpp"
#include "okr/verify.hpp"

using namespace okr;

namespace {

Dictionary dict_of(const RegressionSet& s) {
    Dictionary d;
    for (std::size_t i = 0; i < s.size(); ++i) d.push_back(s.inputs[i]);
    return d;
}

// Restores the OpenMP thread count on scope exit.
struct ThreadCount {
    int saved = omp_get_max_threads();
    explicit ThreadCount(int n) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("parallel kernels equal the serial references bit for bit") {
    KernelSpec spec;
    spec.lengthscale = 0.8;
    spec.jitter = 1e-8;
    // sizes straddle the row-block boundary
    for (std::size_t n : {1u, 63u, 64u, 65u, 200u}) {
        const Dictionary d = dict_of(random_stream(n, n, 3, 2.0));
        const RegressionSet probe = random_stream(n + 1000, 130, 3, 2.0);
        CHECK(gram_matrix(spec, d) == serial::gram_matrix(spec, d));
        CHECK(cross_kernel(spec, d, probe.inputs) == serial::cross_kernel(spec, d, probe.inputs));
    }
}

TEST_CASE("results do not depend on the thread count") {
    KernelSpec spec;
    spec.noise_variance = 0.05;
    const RegressionSet data = random_stream(3, 150, 2, 4.0, 0.5);
    const RegressionSet probe = random_stream(4, 300, 2, 4.0);
    const Dictionary d = dict_of(data);

    GpState gp = gp_init(spec, std::nullopt, 1e-10);
    KlmsParams p;
    p.beta = 0.5;
    KlmsState k = klms_init(spec, KlmsVariant::Beta, p);
    for (std::size_t i = 0; i < data.size(); ++i) {
        gp_update(gp, data.inputs[i], data.targets[i]);
        beta_klms_update(k, data.inputs[i], data.targets[i]);
    }

    Matrix g1, c1;
    std::vector<PredictiveDistribution> p1;
    std::vector<double> k1;
    {
        ThreadCount one(1);
        g1 = gram_matrix(spec, d);
        c1 = cross_kernel(spec, d, probe.inputs);
        p1 = gp_predict_batch(gp, probe.inputs);
        k1 = klms_predict_batch(k, probe.inputs);
    }
    ThreadCount four(4);
    CHECK(gram_matrix(spec, d) == g1);
    CHECK(cross_kernel(spec, d, probe.inputs) == c1);
    const auto p4 = gp_predict_batch(gp, probe.inputs);
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p4[i].mean == p1[i].mean);
        CHECK(p4[i].output_var == p1[i].output_var);
    }
    CHECK(klms_predict_batch(k, probe.inputs) == k1);
    const auto ref = serial::klms_predict_batch(k, probe.inputs);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(ref[i] - k1[i]) < 1e-12);
}
