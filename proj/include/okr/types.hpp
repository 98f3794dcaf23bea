#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace okr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Input = std::span<const double>;

inline Input as_input(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline Input as_input(const std::vector<double>& v) { return {v.data(), v.size()}; }

/// Row-major set of equal-dimension points.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t dim) : dim_(dim) {}
    PointSet(std::size_t dim, std::vector<double> data);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] Input operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

    /// Appends a point; an empty set with dim 0 adopts the point's dimension.
    void push_back(Input x);
    void erase(std::size_t i);
    void clear() noexcept { data_.clear(); }

    [[nodiscard]] PointSet slice(std::size_t first, std::size_t count) const;
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Predictive mean with latent (σ_f²) and observation (σ_y² = σ_n² + σ_f²) variances.
struct PredictiveDistribution {
    double mean = 0.0;
    double latent_var = 0.0;
    double output_var = 0.0;
};

}  // namespace okr
