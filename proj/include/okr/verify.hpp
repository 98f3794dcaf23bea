#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "okr/datasets.hpp"

namespace okr {

/// Random regression stream for equivalence checks: x uniform in
/// [-half_width, half_width]^dim, y = sin(Σx) + N(0, 0.1²). Candidates closer
/// than `min_separation` to an accepted point are redrawn.
[[nodiscard]] RegressionSet random_stream(std::uint64_t seed, std::size_t n, std::size_t dim, double half_width,
                                          double min_separation = 0.0);

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::optional<double> tol;       // replaces every per-check tolerance
    double noise_mismatch = 0.0;     // added to KNLMS ε in the Identity B pairing (negative control)
};

struct CheckResult {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Online/batch equivalence, the KRLS weight bridge, the rank-1 inverse update
/// and the three β-KLMS identities on random instances.
[[nodiscard]] std::vector<CheckResult> run_verification(const VerifyOptions& options);

void print_check_table(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace okr
