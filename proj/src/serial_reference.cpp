// Single-threaded reference paths for the OpenMP kernels. Tests compare the
// parallel results against these; bench/ times both.

#include "okr/kernel.hpp"
#include "okr/klms.hpp"
#include "okr/online_gp.hpp"

#include "okr/errors.hpp"

namespace okr::serial {

Matrix gram_matrix(const KernelSpec& spec, const Dictionary& dict) {
    if (dict.empty()) throw ArgumentError("gram_matrix: empty dictionary");
    const auto m = static_cast<Eigen::Index>(dict.size());
    Matrix K(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            K(i, j) = eval_kernel(spec, dict[static_cast<std::size_t>(i)], dict[static_cast<std::size_t>(j)]);
        }
        K(j, j) += spec.jitter;
    }
    return K;
}

Matrix cross_kernel(const KernelSpec& spec, const Dictionary& dict, const PointSet& points) {
    Matrix Ks(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(dict.size()));
    for (std::size_t r = 0; r < points.size(); ++r) {
        Ks.row(static_cast<Eigen::Index>(r)) = kernel_vector(spec, dict, points[r]).transpose();
    }
    return Ks;
}

std::vector<PredictiveDistribution> gp_predict_batch(const GpState& state, const PointSet& points) {
    std::vector<PredictiveDistribution> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out.push_back(gp_predict(state, points[i]));
    return out;
}

std::vector<double> klms_predict_batch(const KlmsState& state, const PointSet& points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out.push_back(klms_predict(state, points[i]));
    return out;
}

}  // namespace okr::serial
