#include "okr/snapshot.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "okr/errors.hpp"
#include "okr/format.hpp"

namespace okr {

namespace {

constexpr const char* kMagic = "# okr state snapshot v1";

void write_spec(std::ostream& os, const KernelSpec& spec) {
    os << "family=gaussian\n";
    os << "lengthscale=" << format_double(spec.lengthscale) << '\n';
    os << "signal_variance=" << format_double(spec.signal_variance) << '\n';
    os << "noise_variance=" << format_double(spec.noise_variance) << '\n';
    os << "jitter=" << format_double(spec.jitter) << '\n';
}

void write_dict(std::ostream& os, const Dictionary& dict) {
    os << "size=" << dict.size() << '\n';
    os << "dim=" << dict.dim() << '\n';
    os << "next_id=" << dict.next_id() << '\n';
    os << "[dict]\n";
    for (std::size_t i = 0; i < dict.size(); ++i) {
        os << dict.id(i);
        for (double v : dict[i]) os << ',' << format_double(v);
        os << '\n';
    }
}

void write_vector(std::ostream& os, const char* name, const Vector& v) {
    os << '[' << name << "]\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) os << format_double(v[i]) << '\n';
}

void write_matrix(std::ostream& os, const char* name, const Matrix& M) {
    os << '[' << name << "]\n";
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            if (c) os << ',';
            os << format_double(M(r, c));
        }
        os << '\n';
    }
}

struct RawSnapshot {
    std::map<std::string, std::string, std::less<>> header;
    std::map<std::string, std::vector<std::pair<std::size_t, std::string>>, std::less<>> blocks;
};

RawSnapshot read_raw(std::istream& is) {
    RawSnapshot raw;
    std::string line;
    std::size_t row = 0;
    std::string block;
    bool saw_magic = false;
    while (std::getline(is, line)) {
        ++row;
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        if (!saw_magic) {
            if (t != kMagic) throw ParseError("snapshot: missing header line", row);
            saw_magic = true;
            continue;
        }
        if (t.front() == '[') {
            if (t.back() != ']') throw ParseError("snapshot: bad block marker", row);
            block = std::string(t.substr(1, t.size() - 2));
            raw.blocks[block];
            continue;
        }
        if (block.empty()) {
            const auto eq = t.find('=');
            if (eq == std::string_view::npos) throw ParseError("snapshot: expected key=value", row);
            raw.header[std::string(t.substr(0, eq))] = std::string(t.substr(eq + 1));
        } else {
            raw.blocks[block].emplace_back(row, std::string(t));
        }
    }
    if (!saw_magic) throw ParseError("snapshot: empty input", 0);
    return raw;
}

const std::string& header_value(const RawSnapshot& raw, std::string_view key) {
    auto it = raw.header.find(key);
    if (it == raw.header.end()) throw ParseError("snapshot: missing header key '" + std::string(key) + "'", 0);
    return it->second;
}

double header_double(const RawSnapshot& raw, std::string_view key) {
    auto v = parse_double(header_value(raw, key));
    if (!v) throw ParseError("snapshot: non-numeric value for '" + std::string(key) + "'", 0);
    return *v;
}

std::size_t header_size(const RawSnapshot& raw, std::string_view key) {
    const std::string& s = header_value(raw, key);
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ParseError("snapshot: bad integer for '" + std::string(key) + "'", 0);
    }
}

const std::vector<std::pair<std::size_t, std::string>>& block_rows(const RawSnapshot& raw, std::string_view name,
                                                                   std::size_t expected) {
    auto it = raw.blocks.find(name);
    if (it == raw.blocks.end()) throw ParseError("snapshot: missing block [" + std::string(name) + "]", 0);
    if (it->second.size() != expected) {
        throw ParseError("snapshot: block [" + std::string(name) + "] has " + std::to_string(it->second.size()) +
                             " rows, expected " + std::to_string(expected),
                         0);
    }
    return it->second;
}

std::vector<double> parse_row(const std::pair<std::size_t, std::string>& row, std::size_t expected) {
    const auto fields = split_fields(row.second);
    if (fields.size() != expected) throw ParseError("snapshot: wrong field count", row.first);
    std::vector<double> out;
    out.reserve(fields.size());
    for (auto f : fields) {
        auto v = parse_double(f);
        if (!v) throw ParseError("snapshot: non-numeric field '" + std::string(f) + "'", row.first);
        out.push_back(*v);
    }
    return out;
}

KernelSpec read_spec(const RawSnapshot& raw) {
    if (header_value(raw, "family") != "gaussian") throw ParseError("snapshot: unsupported kernel family", 0);
    KernelSpec spec;
    spec.lengthscale = header_double(raw, "lengthscale");
    spec.signal_variance = header_double(raw, "signal_variance");
    spec.noise_variance = header_double(raw, "noise_variance");
    spec.jitter = header_double(raw, "jitter");
    try {
        spec.validate();
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("snapshot: ") + e.what(), 0);
    }
    return spec;
}

Dictionary read_dict(const RawSnapshot& raw) {
    const std::size_t m = header_size(raw, "size");
    const std::size_t dim = header_size(raw, "dim");
    const std::size_t next_id = header_size(raw, "next_id");
    const auto& rows = block_rows(raw, "dict", m);
    PointSet points(dim);
    std::vector<std::size_t> ids;
    for (const auto& row : rows) {
        const auto fields = split_fields(row.second);
        if (fields.size() != dim + 1) throw ParseError("snapshot: wrong field count in [dict]", row.first);
        try {
            ids.push_back(static_cast<std::size_t>(std::stoull(std::string(fields[0]))));
        } catch (const std::exception&) {
            throw ParseError("snapshot: bad dictionary id", row.first);
        }
        std::vector<double> x;
        for (std::size_t j = 1; j < fields.size(); ++j) {
            auto v = parse_double(fields[j]);
            if (!v) throw ParseError("snapshot: non-numeric dictionary coordinate", row.first);
            x.push_back(*v);
        }
        points.push_back(as_input(x));
    }
    try {
        return Dictionary::restore(std::move(points), std::move(ids), next_id);
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("snapshot: ") + e.what(), 0);
    }
}

Vector read_vector(const RawSnapshot& raw, std::string_view name, std::size_t m) {
    const auto& rows = block_rows(raw, name, m);
    Vector v(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) v[static_cast<Eigen::Index>(i)] = parse_row(rows[i], 1)[0];
    return v;
}

Matrix read_matrix(const RawSnapshot& raw, std::string_view name, std::size_t m) {
    const auto& rows = block_rows(raw, name, m);
    Matrix M(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r) {
        const auto vals = parse_row(rows[r], m);
        for (std::size_t c = 0; c < m; ++c) M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = vals[c];
    }
    return M;
}

bool parse_bool(const RawSnapshot& raw, std::string_view key) {
    const std::string& v = header_value(raw, key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ParseError("snapshot: bad boolean for '" + std::string(key) + "'", 0);
}

}  // namespace

void write_snapshot(std::ostream& os, const GpState& state) {
    os << kMagic << '\n' << "model=gp\n";
    write_spec(os, state.spec);
    os << "budget=" << (state.budget ? std::to_string(*state.budget) : std::string("none")) << '\n';
    os << "admission_threshold=" << format_double(state.admission_threshold) << '\n';
    write_dict(os, state.dict);
    write_vector(os, "targets", state.targets);
    write_vector(os, "mu", state.mu);
    write_matrix(os, "sigma", state.sigma);
    write_matrix(os, "q_inv", state.q_inv);
}

void write_snapshot(std::ostream& os, const KlmsState& state) {
    const KlmsParams& p = state.params;
    os << kMagic << '\n' << "model=klms\n";
    write_spec(os, state.spec);
    os << "variant=" << to_string(state.variant) << '\n';
    os << "eta=" << format_double(p.eta) << '\n';
    os << "matched_eta=" << (p.matched_eta ? "true" : "false") << '\n';
    os << "beta=" << format_double(p.beta) << '\n';
    os << "eps_reg=" << format_double(p.eps_reg) << '\n';
    os << "quant_radius=" << format_double(p.quant_radius) << '\n';
    os << "coherence_mu0=" << format_double(p.coherence_mu0) << '\n';
    os << "beta_coherence=" << (p.beta_coherence ? "true" : "false") << '\n';
    write_dict(os, state.dict);
    write_vector(os, "alpha", state.alpha);
}

GpState read_gp_snapshot(std::istream& is) {
    const RawSnapshot raw = read_raw(is);
    if (header_value(raw, "model") != "gp") throw ParseError("snapshot: not a GP snapshot", 0);
    GpState s;
    s.spec = read_spec(raw);
    const std::string& budget = header_value(raw, "budget");
    if (budget != "none") s.budget = header_size(raw, "budget");
    s.admission_threshold = header_double(raw, "admission_threshold");
    s.dict = read_dict(raw);
    const std::size_t m = s.dict.size();
    s.targets = read_vector(raw, "targets", m);
    s.mu = read_vector(raw, "mu", m);
    s.sigma = read_matrix(raw, "sigma", m);
    s.q_inv = read_matrix(raw, "q_inv", m);
    return s;
}

KlmsState read_klms_snapshot(std::istream& is) {
    const RawSnapshot raw = read_raw(is);
    if (header_value(raw, "model") != "klms") throw ParseError("snapshot: not a KLMS snapshot", 0);
    KlmsState s;
    s.spec = read_spec(raw);
    try {
        s.variant = parse_klms_variant(header_value(raw, "variant"));
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("snapshot: ") + e.what(), 0);
    }
    s.params.eta = header_double(raw, "eta");
    s.params.matched_eta = parse_bool(raw, "matched_eta");
    s.params.beta = header_double(raw, "beta");
    s.params.eps_reg = header_double(raw, "eps_reg");
    s.params.quant_radius = header_double(raw, "quant_radius");
    s.params.coherence_mu0 = header_double(raw, "coherence_mu0");
    s.params.beta_coherence = parse_bool(raw, "beta_coherence");
    s.dict = read_dict(raw);
    s.alpha = read_vector(raw, "alpha", s.dict.size());
    return s;
}

}  // namespace okr
