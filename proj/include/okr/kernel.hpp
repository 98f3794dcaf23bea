#pragma once

#include <cstddef>
#include <vector>

#include "okr/types.hpp"

namespace okr {

enum class KernelFamily { Gaussian };

/// Kernel hyperparameters plus the observation noise they are paired with.
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double lengthscale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 0.1;   // σ_n²
    double jitter = 1e-10;         // added to Gram diagonals that get inverted

    /// Throws ArgumentError when a field is out of range.
    void validate() const;

    /// Jitter default that scales with the signal variance.
    static double default_jitter(double signal_variance) { return 1e-10 * signal_variance; }
};

/// Ordered set of dictionary inputs. Each point keeps the id it was inserted with.
class Dictionary {
public:
    Dictionary() = default;
    explicit Dictionary(std::size_t dim) : points_(dim) {}

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
    [[nodiscard]] std::size_t dim() const noexcept { return points_.dim(); }
    [[nodiscard]] Input operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] std::size_t id(std::size_t i) const { return ids_[i]; }
    [[nodiscard]] const std::vector<std::size_t>& ids() const noexcept { return ids_; }
    [[nodiscard]] std::size_t next_id() const noexcept { return next_id_; }
    [[nodiscard]] const PointSet& points() const noexcept { return points_; }

    /// Returns the id assigned to x.
    std::size_t push_back(Input x);
    void erase(std::size_t i);

    /// Rebuilds a dictionary from serialized parts.
    static Dictionary restore(PointSet points, std::vector<std::size_t> ids, std::size_t next_id);

    friend bool operator==(const Dictionary&, const Dictionary&) = default;

private:
    PointSet points_;
    std::vector<std::size_t> ids_;
    std::size_t next_id_ = 0;
};

[[nodiscard]] double squared_distance(Input a, Input b);

/// k(x, x') = σ_f² exp(-|x - x'|² / (2 ℓ²)).
[[nodiscard]] double eval_kernel(const KernelSpec& spec, Input x, Input xp);

/// k(x, x), without jitter.
[[nodiscard]] inline double kernel_diag(const KernelSpec& spec) { return spec.signal_variance; }

[[nodiscard]] Vector kernel_vector(const KernelSpec& spec, const Dictionary& dict, Input x);

/// K with jitter on the diagonal. Parallel over rows.
[[nodiscard]] Matrix gram_matrix(const KernelSpec& spec, const Dictionary& dict);

/// Row i holds kernel_vector(spec, dict, points[i]). Parallel over points.
[[nodiscard]] Matrix cross_kernel(const KernelSpec& spec, const Dictionary& dict, const PointSet& points);

/// Throws ArgumentError unless dim(x) matches a non-empty dictionary.
void check_dim(const Dictionary& dict, Input x);

namespace serial {

// Single-threaded references for the parallel kernels above; kept for tests and benchmarks.
[[nodiscard]] Matrix gram_matrix(const KernelSpec& spec, const Dictionary& dict);
[[nodiscard]] Matrix cross_kernel(const KernelSpec& spec, const Dictionary& dict, const PointSet& points);

}  // namespace serial

}  // namespace okr
