#include "okr/regressor.hpp"

#include <cstring>
#include <ostream>

#include "okr/errors.hpp"
#include "okr/format.hpp"
#include "okr/snapshot.hpp"

namespace okr {

namespace {

class Fnv1a {
public:
    void add(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 1099511628211ULL;
        }
    }
    void add(double v) { add(&v, sizeof v); }
    void add(std::size_t v) { add(&v, sizeof v); }
    void add(const std::vector<double>& v) { add(v.data(), v.size() * sizeof(double)); }
    void add(const Vector& v) { add(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double)); }
    void add(const Matrix& m) { add(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double)); }
    void add(const Dictionary& d) {
        add(d.size());
        add(d.points().data());
        add(d.ids().data(), d.ids().size() * sizeof(std::size_t));
    }
    [[nodiscard]] std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 14695981039346656037ULL;
};

double parse_param(std::string_view token, std::string_view value) {
    auto v = parse_double(value);
    if (!v) throw ArgumentError("algorithm '" + std::string(token) + "': bad parameter '" + std::string(value) + "'");
    return *v;
}

}  // namespace

std::vector<double> GpRegressor::predict_mean_batch(const PointSet& points) const {
    const auto preds = gp_predict_batch(state_, points);
    std::vector<double> out(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) out[i] = preds[i].mean;
    return out;
}

std::uint64_t GpRegressor::state_hash() const {
    Fnv1a h;
    h.add(state_.dict);
    h.add(state_.targets);
    h.add(state_.mu);
    h.add(state_.sigma);
    h.add(state_.q_inv);
    return h.value();
}

void GpRegressor::write_snapshot(std::ostream& os) const { okr::write_snapshot(os, state_); }

PredictiveDistribution KlmsRegressor::predict(Input x) const {
    double beta = 0.0;
    switch (state_.variant) {
        case KlmsVariant::TypeI:
        case KlmsVariant::Qklms: beta = 0.0; break;
        case KlmsVariant::Knlms: beta = 1.0; break;
        case KlmsVariant::Beta: beta = state_.params.beta; break;
    }
    const Vector k = kernel_vector(state_.spec, state_.dict, x);
    PredictiveDistribution p;
    p.mean = state_.dict.empty() ? 0.0 : k.dot(state_.alpha);
    p.latent_var = kernel_diag(state_.spec) + beta * k.squaredNorm();
    p.output_var = state_.spec.noise_variance + p.latent_var;
    return p;
}

std::uint64_t KlmsRegressor::state_hash() const {
    Fnv1a h;
    h.add(state_.dict);
    h.add(state_.alpha);
    return h.value();
}

void KlmsRegressor::write_snapshot(std::ostream& os) const { okr::write_snapshot(os, state_); }

AlgorithmConfig parse_algorithm(std::string_view token, const AlgorithmDefaults& d, const KernelSpec& spec) {
    AlgorithmConfig c;
    c.label = std::string(token);
    const auto colon = token.find(':');
    const std::string_view kind = token.substr(0, colon);
    const std::optional<std::string_view> arg =
        colon == std::string_view::npos ? std::nullopt : std::optional(token.substr(colon + 1));
    c.kind = std::string(kind);

    c.klms.beta = d.beta;
    c.klms.quant_radius = d.quant_radius;
    c.klms.coherence_mu0 = d.coherence_mu0;
    c.klms.eps_reg = d.eps_reg.value_or(spec.noise_variance);
    c.budget = d.budget;
    c.admission_threshold = d.admission_threshold;

    if (kind == "gp") {
        if (arg) {
            const double b = parse_param(token, *arg);
            if (!(b >= 1.0) || b != static_cast<double>(static_cast<std::size_t>(b)))
                throw ArgumentError("algorithm '" + std::string(token) + "': budget must be a positive integer");
            c.budget = static_cast<std::size_t>(b);
        }
    } else if (kind == "beta") {
        if (arg) c.klms.beta = parse_param(token, *arg);
    } else if (kind == "klms" || kind == "qklms") {
        if (d.eta) c.klms.eta = *d.eta;
        else c.klms.matched_eta = true;
        if (arg) {
            if (kind == "klms") {
                c.klms.eta = parse_param(token, *arg);
                c.klms.matched_eta = false;
            } else {
                c.klms.quant_radius = parse_param(token, *arg);
            }
        }
    } else if (kind == "knlms") {
        c.klms.eta = d.eta.value_or(1.0);
        if (arg) c.klms.coherence_mu0 = parse_param(token, *arg);
    } else {
        throw ArgumentError("unknown algorithm '" + std::string(token) + "' (expected gp, klms, qklms, knlms, beta)");
    }
    if (kind != "gp") {
        // validates parameter ranges
        (void)klms_init(spec, parse_klms_variant(kind), c.klms);
    }
    return c;
}

std::vector<AlgorithmConfig> parse_algorithm_list(std::string_view list, const AlgorithmDefaults& defaults,
                                                  const KernelSpec& spec) {
    std::vector<AlgorithmConfig> out;
    for (auto tok : split_fields(list)) {
        if (tok.empty()) continue;
        out.push_back(parse_algorithm(tok, defaults, spec));
    }
    if (out.empty()) throw ArgumentError("no algorithms configured");
    return out;
}

std::unique_ptr<OnlineRegressor> make_regressor(const AlgorithmConfig& config, const KernelSpec& spec) {
    if (config.kind == "gp") {
        return std::make_unique<GpRegressor>(config.label, gp_init(spec, config.budget, config.admission_threshold));
    }
    return std::make_unique<KlmsRegressor>(config.label,
                                           klms_init(spec, parse_klms_variant(config.kind), config.klms));
}

}  // namespace okr
