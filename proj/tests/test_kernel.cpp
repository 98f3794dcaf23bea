#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "okr/errors.hpp"
#include "okr/kernel.hpp"

using namespace okr;

namespace {

KernelSpec unit() {
    KernelSpec s;
    s.lengthscale = 1.0;
    s.signal_variance = 1.0;
    s.jitter = 0.0;
    return s;
}

Dictionary random_dict(std::mt19937_64& rng, std::size_t n, std::size_t dim, double half_width) {
    std::uniform_real_distribution<double> u(-half_width, half_width);
    Dictionary d;
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x) v = u(rng);
        d.push_back(as_input(x));
    }
    return d;
}

}  // namespace

TEST_CASE("gaussian kernel values") {
    const std::vector<double> zero{0.0};
    const std::vector<double> r2{std::sqrt(2.0)};
    CHECK(eval_kernel(unit(), as_input(zero), as_input(zero)) == 1.0);
    CHECK(eval_kernel(unit(), as_input(zero), as_input(r2)) == doctest::Approx(0.367879).epsilon(1e-6));

    KernelSpec s = unit();
    s.lengthscale = 2.0;
    s.signal_variance = 3.0;
    const std::vector<double> p{1.0, 1.0};
    CHECK(eval_kernel(s, as_input(p), as_input(p)) == 3.0);
}

TEST_CASE("kernel symmetry, diagonal and bounds on random pairs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    KernelSpec s;
    s.lengthscale = 0.7;
    s.signal_variance = 2.5;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(3), b(3);
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        const double kab = eval_kernel(s, as_input(a), as_input(b));
        CHECK(kab == eval_kernel(s, as_input(b), as_input(a)));
        CHECK(eval_kernel(s, as_input(a), as_input(a)) == s.signal_variance);
        CHECK(kab > 0.0);
        CHECK(kab <= s.signal_variance);
    }
}

TEST_CASE("kernel_vector") {
    Dictionary d;
    const std::vector<double> zero{0.0};
    CHECK(kernel_vector(unit(), d, as_input(zero)).size() == 0);

    d.push_back(as_input(zero));
    Vector k = kernel_vector(unit(), d, as_input(zero));
    REQUIRE(k.size() == 1);
    CHECK(k(0) == 1.0);

    const std::vector<double> r2{std::sqrt(2.0)};
    d.push_back(as_input(r2));
    k = kernel_vector(unit(), d, as_input(zero));
    REQUIRE(k.size() == 2);
    CHECK(k(0) == 1.0);
    CHECK(k(1) == doctest::Approx(0.367879).epsilon(1e-6));
}

TEST_CASE("gram_matrix") {
    Dictionary d;
    const std::vector<double> a{0.0}, b{1.0};
    d.push_back(as_input(a));
    Matrix K = gram_matrix(unit(), d);
    REQUIRE(K.rows() == 1);
    CHECK(K(0, 0) == 1.0);

    d.push_back(as_input(b));
    K = gram_matrix(unit(), d);
    CHECK(K(0, 0) == 1.0);
    CHECK(K(1, 1) == 1.0);
    CHECK(K(0, 1) == doctest::Approx(0.606531).epsilon(1e-6));
    CHECK(K(1, 0) == K(0, 1));

    KernelSpec j = unit();
    j.jitter = 1e-3;
    CHECK(gram_matrix(j, d)(0, 0) == doctest::Approx(1.001));

    Dictionary far;
    const std::vector<double> f1{0.0}, f2{100.0};
    far.push_back(as_input(f1));
    far.push_back(as_input(f2));
    const Matrix F = gram_matrix(unit(), far);
    CHECK(F(0, 1) < 1e-300);
    CHECK(F(0, 0) == 1.0);
}

TEST_CASE("gram_matrix is PSD on random dictionaries") {
    std::mt19937_64 rng(11);
    KernelSpec s;
    s.jitter = 1e-10;
    for (std::size_t n : {5u, 20u, 50u}) {
        const Dictionary d = random_dict(rng, n, 2, 2.0);
        const Matrix K = gram_matrix(s, d);
        Eigen::SelfAdjointEigenSolver<Matrix> es(K);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
        CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("cross_kernel rows are kernel vectors") {
    std::mt19937_64 rng(3);
    KernelSpec s;
    const Dictionary d = random_dict(rng, 7, 3, 1.0);
    const Dictionary pts = random_dict(rng, 9, 3, 1.0);
    const Matrix C = cross_kernel(s, d, pts.points());
    REQUIRE(C.rows() == 9);
    REQUIRE(C.cols() == 7);
    for (std::size_t i = 0; i < 9; ++i)
        CHECK((C.row(static_cast<Eigen::Index>(i)).transpose() - kernel_vector(s, d, pts[i])).cwiseAbs().maxCoeff() ==
              0.0);
}

TEST_CASE("dictionary ids survive erasure") {
    Dictionary d;
    for (double x : {1.0, 2.0, 3.0}) {
        const std::vector<double> p{x};
        d.push_back(as_input(p));
    }
    d.erase(0);
    CHECK(d.size() == 2);
    CHECK(d.id(0) == 1);
    CHECK(d[0][0] == 2.0);
    const std::vector<double> p{4.0};
    CHECK(d.push_back(as_input(p)) == 3);
}

TEST_CASE("dimension and parameter errors") {
    Dictionary d;
    const std::vector<double> a{0.0, 1.0};
    d.push_back(as_input(a));
    const std::vector<double> bad{0.0};
    CHECK_THROWS_AS(check_dim(d, as_input(bad)), ArgumentError);
    CHECK_THROWS_AS((void)kernel_vector(unit(), d, as_input(bad)), ArgumentError);

    KernelSpec s;
    s.lengthscale = 0.0;
    CHECK_THROWS_AS(s.validate(), ArgumentError);
    s = KernelSpec{};
    s.signal_variance = -1.0;
    CHECK_THROWS_AS(s.validate(), ArgumentError);
    s = KernelSpec{};
    s.noise_variance = -0.1;
    CHECK_THROWS_AS(s.validate(), ArgumentError);
    s = KernelSpec{};
    s.jitter = std::nan("");
    CHECK_THROWS_AS(s.validate(), ArgumentError);
}
