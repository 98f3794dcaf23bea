#include "okr/datasets.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "okr/errors.hpp"
#include "okr/format.hpp"

namespace okr {

namespace {

// Independent engines for independent purposes of one seed.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint32_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose};
    return std::mt19937_64(seq);
}

enum Purpose : std::uint32_t { kKinematics = 1, kSinc = 2, kChannels = 3, kSource = 4, kNoise = 5 };

// Root radii of the random channels. Minimum phase keeps the source
// recoverable from past outputs, so most of each sample is predictable.
constexpr double kMinRootRadius = 0.5;
constexpr double kMaxRootRadius = 0.95;

}  // namespace

RegressionSet RegressionSet::slice(std::size_t first, std::size_t count) const {
    RegressionSet out;
    out.inputs = inputs.slice(first, count);
    out.targets.assign(targets.begin() + static_cast<std::ptrdiff_t>(first),
                       targets.begin() + static_cast<std::ptrdiff_t>(first + count));
    out.name = name;
    out.seed = seed;
    return out;
}

double kinematics_like_target(Input x) {
    double angle = 0.0;
    double f = 0.0;
    for (double xi : x) {
        angle += xi * std::numbers::pi;
        f += std::cos(angle);
    }
    return f;
}

std::pair<RegressionSet, RegressionSet> gen_kinematics_like(std::uint64_t seed, std::size_t n_train,
                                                            std::size_t n_test, std::size_t d) {
    if (n_train == 0 || n_test == 0) throw ArgumentError("gen_kinematics_like: set sizes must be >= 1");
    if (d == 0) throw ArgumentError("gen_kinematics_like: dimension must be >= 1");
    auto rng = make_engine(seed, kKinematics);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.05);

    auto draw = [&](std::size_t n, const char* name) {
        RegressionSet s;
        s.inputs = PointSet(d);
        s.name = name;
        s.seed = seed;
        std::vector<double> x(d);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : x) v = uni(rng);
            s.inputs.push_back(as_input(x));
            s.targets.push_back(kinematics_like_target(as_input(x)) + noise(rng));
        }
        return s;
    };
    RegressionSet train = draw(n_train, "kin-like-train");
    RegressionSet test = draw(n_test, "kin-like-test");
    return {std::move(train), std::move(test)};
}

RegressionSet gen_sinc_1d(std::uint64_t seed, std::size_t n, double noise_std, double lo, double hi) {
    if (!(hi > lo)) throw ArgumentError("gen_sinc_1d: empty interval");
    if (!(noise_std >= 0.0)) throw ArgumentError("gen_sinc_1d: noise_std must be >= 0");
    auto rng = make_engine(seed, kSinc);
    std::uniform_real_distribution<double> uni(lo, hi);
    std::normal_distribution<double> noise(0.0, 1.0);
    RegressionSet s;
    s.inputs = PointSet(1);
    s.name = "sinc1d";
    s.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = uni(rng);
        const double px = std::numbers::pi * x;
        const double f = px == 0.0 ? 1.0 : std::sin(px) / px;
        s.inputs.push_back(Input(&x, 1));
        s.targets.push_back(f + noise_std * noise(rng));
    }
    return s;
}

void SwitchScenario::validate() const {
    if (n_total == 0) throw ArgumentError("switch scenario: n_total must be positive");
    if (switch_at == 0 || switch_at >= n_total) throw ArgumentError("switch scenario: need 0 < switch_at < n_total");
    if (channel_a.empty() || channel_b.empty()) throw ArgumentError("switch scenario: channels must be non-empty");
    if (!(noise_std >= 0.0)) throw ArgumentError("switch scenario: noise_std must be >= 0");
    if (embedding_dim == 0) throw ArgumentError("switch scenario: embedding_dim must be positive");
}

ChannelModel parse_channel_model(std::string_view s) {
    if (s == "gaussian") return ChannelModel::Gaussian;
    if (s == "minphase") return ChannelModel::MinimumPhase;
    throw ArgumentError("unknown channel model '" + std::string(s) + "' (expected gaussian or minphase)");
}

SwitchScenario random_switch_scenario(std::uint64_t seed, std::size_t channel_length, ChannelModel model) {
    if (channel_length == 0) throw ArgumentError("random_switch_scenario: channel length must be positive");
    auto rng = make_engine(seed, kChannels);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> radius(kMinRootRadius, kMaxRootRadius);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Monic polynomial from random roots inside the unit circle (conjugate
    // pairs or real), then scaled to unit energy.
    auto draw_minimum_phase = [&] {
        std::vector<std::complex<double>> poly{1.0};
        auto mul_root = [&](std::complex<double> z) {
            poly.push_back(0.0);
            for (std::size_t i = poly.size() - 1; i > 0; --i) poly[i] -= z * poly[i - 1];
        };
        std::size_t remaining = channel_length - 1;
        while (remaining > 0) {
            const double r = radius(rng);
            if (remaining >= 2 && unit(rng) < 0.5) {
                const auto z = std::polar(r, std::numbers::pi * unit(rng));
                mul_root(z);
                mul_root(std::conj(z));
                remaining -= 2;
            } else {
                mul_root(unit(rng) < 0.5 ? -r : r);
                remaining -= 1;
            }
        }
        std::vector<double> h(channel_length);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = poly[i].real();
        return h;
    };
    auto draw = [&] {
        std::vector<double> h(channel_length);
        if (model == ChannelModel::MinimumPhase) {
            h = draw_minimum_phase();
        } else {
            for (auto& v : h) v = gauss(rng);
        }
        double energy = 0.0;
        for (double v : h) energy += v * v;
        const double scale = 1.0 / std::sqrt(energy);
        for (auto& v : h) v *= scale;
        return h;
    };
    SwitchScenario sc;
    sc.seed = seed;
    sc.channel_a = draw();
    sc.channel_b = draw();
    return sc;
}

SwitchSeries gen_switch_series(const SwitchScenario& sc) {
    sc.validate();
    const std::size_t E = sc.embedding_dim;
    const std::size_t L = std::max(sc.channel_a.size(), sc.channel_b.size());
    const std::size_t warm = E + L;  // samples of s before t = 0
    const std::size_t total = warm + sc.n_total;

    auto src_rng = make_engine(sc.seed, kSource);
    auto noise_rng = make_engine(sc.seed, kNoise);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> s(total);
    for (auto& v : s) v = gauss(src_rng);

    // v[j] holds the series at t = j - E, for j in [0, E + n_total).
    std::vector<double> v(E + sc.n_total);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const std::size_t si = j + L;  // index of s_t in `s`
        const bool after = j >= E && (j - E) >= sc.switch_at;
        const auto& h = after ? sc.channel_b : sc.channel_a;
        double c = 0.0;
        for (std::size_t tap = 0; tap < h.size(); ++tap) c += h[tap] * s[si - tap];
        double out = 0.0;
        switch (sc.nonlinearity) {
            case Nonlinearity::TanhSat: out = std::tanh(c); break;
        }
        if (sc.noise_std > 0.0) out += sc.noise_std * gauss(noise_rng);
        v[j] = out;
    }

    SwitchSeries series;
    series.stream.inputs = PointSet(E);
    series.stream.name = "switch";
    series.stream.seed = sc.seed;
    std::vector<double> x(E);
    for (std::size_t t = 0; t < sc.n_total; ++t) {
        const std::size_t j = t + E;
        for (std::size_t lag = 1; lag <= E; ++lag) x[lag - 1] = v[j - lag];
        series.stream.inputs.push_back(as_input(x));
        series.stream.targets.push_back(v[j]);
        series.source.push_back(s[j + L]);
        series.regime.push_back(t >= sc.switch_at ? 1 : 0);
    }
    return series;
}

RegressionSet load_csv(const std::filesystem::path& path, std::size_t d, bool skip_header) {
    if (d == 0) throw ArgumentError("load_csv: dimension must be >= 1");
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    RegressionSet set;
    set.inputs = PointSet(d);
    set.name = path.filename().string();
    std::string line;
    std::size_t row = 0;
    std::vector<double> x(d);
    while (std::getline(in, line)) {
        ++row;
        if (skip_header && row == 1) continue;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != d + 1) {
            throw ParseError(path.string() + ": row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                                 " fields, expected " + std::to_string(d + 1),
                             row);
        }
        for (std::size_t j = 0; j <= d; ++j) {
            const auto v = parse_double(fields[j]);
            if (!v || !std::isfinite(*v)) {
                throw ParseError(path.string() + ": row " + std::to_string(row) + ": non-numeric field '" +
                                     std::string(fields[j]) + "'",
                                 row);
            }
            if (j < d) x[j] = *v;
            else set.targets.push_back(*v);
        }
        set.inputs.push_back(as_input(x));
    }
    if (in.bad()) throw IoError("read error on '" + path.string() + "'");
    return set;
}

void standardize_inputs(RegressionSet& reference, RegressionSet& other) {
    const std::size_t n = reference.size();
    const std::size_t d = reference.dim();
    if (n == 0) return;
    if (!other.inputs.empty() && other.dim() != d) throw ArgumentError("standardize_inputs: dimension mismatch");
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += reference.inputs[i][j];
    for (auto& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) sd[j] += std::pow(reference.inputs[i][j] - mean[j], 2);
    for (auto& s : sd) s = std::sqrt(s / static_cast<double>(n));

    auto apply = [&](RegressionSet& set) {
        std::vector<double> data = set.inputs.data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::size_t j = i % d;
            data[i] = sd[j] > 0.0 ? (data[i] - mean[j]) / sd[j] : data[i] - mean[j];
        }
        set.inputs = PointSet(d, std::move(data));
    };
    apply(reference);
    apply(other);
}

}  // namespace okr
