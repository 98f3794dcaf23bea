#include "okr/kernel.hpp"

#include <cmath>
#include <string>

#include "okr/errors.hpp"

namespace okr {

PointSet::PointSet(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
    if (dim_ == 0 && !data_.empty()) throw ArgumentError("PointSet: zero dimension with data");
    if (dim_ != 0 && data_.size() % dim_ != 0) throw ArgumentError("PointSet: data size not a multiple of dim");
}

void PointSet::push_back(Input x) {
    if (x.empty()) throw ArgumentError("PointSet: zero-dimensional point");
    if (dim_ == 0 && data_.empty()) dim_ = x.size();
    if (x.size() != dim_) {
        throw ArgumentError("PointSet: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                            std::to_string(dim_) + ")");
    }
    data_.insert(data_.end(), x.begin(), x.end());
}

void PointSet::erase(std::size_t i) {
    if (i >= size()) throw ArgumentError("PointSet: erase index out of range");
    auto first = data_.begin() + static_cast<std::ptrdiff_t>(i * dim_);
    data_.erase(first, first + static_cast<std::ptrdiff_t>(dim_));
}

PointSet PointSet::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw ArgumentError("PointSet: slice out of range");
    auto b = data_.begin() + static_cast<std::ptrdiff_t>(first * dim_);
    return PointSet(dim_, std::vector<double>(b, b + static_cast<std::ptrdiff_t>(count * dim_)));
}

void KernelSpec::validate() const {
    if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) throw ArgumentError("kernel lengthscale must be > 0");
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
        throw ArgumentError("kernel signal variance must be > 0");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw ArgumentError("noise variance must be >= 0");
    if (!(jitter >= 0.0) || !std::isfinite(jitter)) throw ArgumentError("jitter must be >= 0");
}

std::size_t Dictionary::push_back(Input x) {
    points_.push_back(x);
    ids_.push_back(next_id_);
    return next_id_++;
}

void Dictionary::erase(std::size_t i) {
    points_.erase(i);
    ids_.erase(ids_.begin() + static_cast<std::ptrdiff_t>(i));
}

Dictionary Dictionary::restore(PointSet points, std::vector<std::size_t> ids, std::size_t next_id) {
    if (ids.size() != points.size()) throw ArgumentError("Dictionary: ids/points size mismatch");
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] >= next_id || (i > 0 && ids[i] <= ids[i - 1]))
            throw ArgumentError("Dictionary: ids must be increasing and below next_id");
    }
    Dictionary d;
    d.points_ = std::move(points);
    d.ids_ = std::move(ids);
    d.next_id_ = next_id;
    return d;
}

double squared_distance(Input a, Input b) {
    if (a.size() != b.size()) {
        throw ArgumentError("dimension mismatch (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        r += d * d;
    }
    return r;
}

double eval_kernel(const KernelSpec& spec, Input x, Input xp) {
    const double r2 = squared_distance(x, xp);
    return spec.signal_variance * std::exp(-r2 / (2.0 * spec.lengthscale * spec.lengthscale));
}

void check_dim(const Dictionary& dict, Input x) {
    if (!dict.empty() && x.size() != dict.dim()) {
        throw ArgumentError("input dimension " + std::to_string(x.size()) + " does not match dictionary dimension " +
                            std::to_string(dict.dim()));
    }
}

Vector kernel_vector(const KernelSpec& spec, const Dictionary& dict, Input x) {
    check_dim(dict, x);
    Vector k(static_cast<Eigen::Index>(dict.size()));
    for (std::size_t i = 0; i < dict.size(); ++i) k[static_cast<Eigen::Index>(i)] = eval_kernel(spec, dict[i], x);
    return k;
}

Matrix gram_matrix(const KernelSpec& spec, const Dictionary& dict) {
    if (dict.empty()) throw ArgumentError("gram_matrix: empty dictionary");
    const auto m = static_cast<Eigen::Index>(dict.size());
    Matrix K(m, m);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index j = 0; j < m; ++j) {
        K(j, j) = kernel_diag(spec) + spec.jitter;
        for (Eigen::Index i = j + 1; i < m; ++i) {
            const double v = eval_kernel(spec, dict[static_cast<std::size_t>(i)], dict[static_cast<std::size_t>(j)]);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Matrix cross_kernel(const KernelSpec& spec, const Dictionary& dict, const PointSet& points) {
    if (!dict.empty() && !points.empty() && points.dim() != dict.dim())
        throw ArgumentError("cross_kernel: dimension mismatch");
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto m = static_cast<Eigen::Index>(dict.size());
    Matrix Ks(n, m);
#pragma omp parallel for schedule(static)
    for (Eigen::Index r = 0; r < n; ++r) {
        const Input x = points[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < m; ++c) Ks(r, c) = eval_kernel(spec, dict[static_cast<std::size_t>(c)], x);
    }
    return Ks;
}

}  // namespace okr
