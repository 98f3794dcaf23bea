#include "okr/evaluation.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <ostream>

#include "okr/errors.hpp"
#include "okr/format.hpp"

namespace okr {

namespace {

// Runs body(i) for i in [0, n) in parallel and rethrows the first exception
// (by index) once all iterations finished.
template <typename Body>
void parallel_replicates(std::size_t n, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

double nmse_db(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) throw ArgumentError("nmse_db: size mismatch");
    if (targets.empty()) throw ArgumentError("nmse_db: empty input");
    const double n = static_cast<double>(targets.size());
    double mean = 0.0;
    for (double y : targets) mean += y;
    mean /= n;
    double var = 0.0;
    double mse = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        var += (targets[i] - mean) * (targets[i] - mean);
        mse += (predictions[i] - targets[i]) * (predictions[i] - targets[i]);
    }
    var /= n;
    mse /= n;
    if (!(var > 0.0)) throw ArgumentError("nmse_db: targets have zero variance");
    if (mse == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(mse / var);
}

LearningCurve run_online_experiment(OnlineRegressor& model, const RegressionSet& train, const RegressionSet& test,
                                    std::size_t eval_every) {
    if (eval_every == 0) throw ArgumentError("run_online_experiment: eval_every must be positive");
    if (test.size() == 0) throw ArgumentError("run_online_experiment: empty test set");
    LearningCurve curve;
    curve.algorithm = model.name();
    auto evaluate = [&](std::size_t step) {
        const auto preds = model.predict_mean_batch(test.inputs);
        curve.points.push_back({step, nmse_db(preds, test.targets)});
    };
    for (std::size_t t = 0; t < train.size(); ++t) {
        model.update(train.inputs[t], train.targets[t]);
        if ((t + 1) % eval_every == 0) evaluate(t + 1);
    }
    if (curve.points.empty() || curve.points.back().step != train.size()) evaluate(train.size());
    return curve;
}

std::vector<std::vector<LearningCurve>> run_compare(const std::vector<AlgorithmConfig>& algorithms,
                                                    const KernelSpec& spec,
                                                    const std::vector<CompareReplicate>& replicates,
                                                    std::size_t eval_every, const ModelObserver& on_trained) {
    const std::size_t n_alg = algorithms.size();
    const std::size_t n_rep = replicates.size();
    std::vector<std::vector<LearningCurve>> out(n_alg, std::vector<LearningCurve>(n_rep));
    parallel_replicates(n_alg * n_rep, [&](std::size_t job) {
        const std::size_t a = job / n_rep;
        const std::size_t r = job % n_rep;
        auto model = make_regressor(algorithms[a], spec);
        out[a][r] = run_online_experiment(*model, replicates[r].train, replicates[r].test, eval_every);
        if (on_trained) on_trained(a, r, *model);
    });
    return out;
}

LearningCurve average_curves(const std::vector<LearningCurve>& curves) {
    if (curves.empty()) throw ArgumentError("average_curves: no curves");
    LearningCurve avg = curves.front();
    for (std::size_t c = 1; c < curves.size(); ++c) {
        if (curves[c].points.size() != avg.points.size()) throw ArgumentError("average_curves: step grids differ");
        for (std::size_t i = 0; i < avg.points.size(); ++i) {
            if (curves[c].points[i].step != avg.points[i].step)
                throw ArgumentError("average_curves: step grids differ");
            avg.points[i].nmse_db += curves[c].points[i].nmse_db;
        }
    }
    for (auto& p : avg.points) p.nmse_db /= static_cast<double>(curves.size());
    return avg;
}

ReconvergenceResult run_reconvergence(const ReconvergenceConfig& config, const std::vector<AlgorithmConfig>& algorithms,
                                      const KernelSpec& spec) {
    if (config.n_seeds == 0) throw ArgumentError("run_reconvergence: need at least one seed");
    if (config.smoothing == 0) throw ArgumentError("run_reconvergence: smoothing window must be >= 1");
    if (algorithms.empty()) throw ArgumentError("run_reconvergence: no algorithms");

    // Per seed: one series shared by every algorithm.
    std::vector<SwitchSeries> series(config.n_seeds);
    for (std::size_t s = 0; s < config.n_seeds; ++s) {
        SwitchScenario sc = random_switch_scenario(config.base_seed + s, config.channel_length, config.channel_model);
        sc.n_total = config.scenario.n_total;
        sc.switch_at = config.scenario.switch_at;
        sc.nonlinearity = config.scenario.nonlinearity;
        sc.noise_std = config.scenario.noise_std;
        sc.embedding_dim = config.scenario.embedding_dim;
        series[s] = gen_switch_series(sc);
    }

    const std::size_t n_alg = algorithms.size();
    const std::size_t n_seed = config.n_seeds;
    const std::size_t T = config.scenario.n_total;
    std::vector<std::vector<double>> sq(n_alg * n_seed, std::vector<double>(T));
    parallel_replicates(n_alg * n_seed, [&](std::size_t job) {
        const std::size_t a = job / n_seed;
        const std::size_t s = job % n_seed;
        auto model = make_regressor(algorithms[a], spec);
        const RegressionSet& stream = series[s].stream;
        for (std::size_t t = 0; t < T; ++t) {
            const double e = model->update(stream.inputs[t], stream.targets[t]);
            sq[job][t] = e * e;
        }
    });

    ReconvergenceResult result;
    result.switch_at = config.scenario.switch_at;
    result.n_seeds = n_seed;
    result.smoothing = config.smoothing;
    for (std::size_t a = 0; a < n_alg; ++a) {
        ReconvergenceCurve c;
        c.algorithm = algorithms[a].label;
        c.mean_sq_error.assign(T, 0.0);
        for (std::size_t s = 0; s < n_seed; ++s)
            for (std::size_t t = 0; t < T; ++t) c.mean_sq_error[t] += sq[a * n_seed + s][t];
        for (auto& v : c.mean_sq_error) v /= static_cast<double>(n_seed);

        c.smoothed_db.resize(T);
        double acc = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            acc += c.mean_sq_error[t];
            if (t >= config.smoothing) acc -= c.mean_sq_error[t - config.smoothing];
            const std::size_t w = std::min(t + 1, config.smoothing);
            c.smoothed_db[t] = 10.0 * std::log10(acc / static_cast<double>(w));
        }
        result.curves.push_back(std::move(c));
    }
    return result;
}

double window_mean(std::span<const double> values, std::size_t first, std::size_t last) {
    if (first > last || last >= values.size()) throw ArgumentError("window_mean: range out of bounds");
    double acc = 0.0;
    for (std::size_t i = first; i <= last; ++i) acc += values[i];
    return acc / static_cast<double>(last - first + 1);
}

std::vector<UncertaintyTrace> run_uncertainty_trace(const RegressionSet& data, const std::vector<std::size_t>& prefixes,
                                                    const std::vector<double>& grid, const KernelSpec& spec) {
    if (data.dim() != 1) throw ArgumentError("run_uncertainty_trace: inputs must be 1-D");
    if (grid.empty()) throw ArgumentError("run_uncertainty_trace: empty grid");
    std::vector<UncertaintyTrace> traces;
    for (std::size_t prefix : prefixes) {
        if (prefix == 0 || prefix > data.size()) throw ArgumentError("run_uncertainty_trace: bad prefix size");
        GpState gp = gp_init(spec, std::nullopt, 0.0);
        KlmsParams p0, p1;
        p0.beta = 0.0;
        p1.beta = 1.0;
        KlmsState b0 = klms_init(spec, KlmsVariant::Beta, p0);
        KlmsState b1 = klms_init(spec, KlmsVariant::Beta, p1);
        for (std::size_t i = 0; i < prefix; ++i) {
            gp_update(gp, data.inputs[i], data.targets[i]);
            beta_klms_update(b0, data.inputs[i], data.targets[i]);
            beta_klms_update(b1, data.inputs[i], data.targets[i]);
        }
        UncertaintyTrace tg{"gp", prefix, grid, {}, {}};
        UncertaintyTrace t0{"beta:0", prefix, grid, {}, {}};
        UncertaintyTrace t1{"beta:1", prefix, grid, {}, {}};
        for (double x : grid) {
            const Input in(&x, 1);
            const auto pg = gp_predict(gp, in);
            tg.mean.push_back(pg.mean);
            tg.std.push_back(std::sqrt(pg.output_var));
            t0.std.push_back(std::sqrt(beta_variance(b0, in).sigma_y2));
            t1.std.push_back(std::sqrt(beta_variance(b1, in).sigma_y2));
        }
        t0.mean = tg.mean;
        t1.mean = tg.mean;
        traces.push_back(std::move(tg));
        traces.push_back(std::move(t0));
        traces.push_back(std::move(t1));
    }
    return traces;
}

void write_learning_curves_csv(std::ostream& os, const std::vector<LearningCurve>& curves) {
    os << "algorithm,step,nmse_db\n";
    for (const auto& c : curves)
        for (const auto& p : c.points) os << c.algorithm << ',' << p.step << ',' << format_double(p.nmse_db) << '\n';
}

void write_reconvergence_csv(std::ostream& os, const ReconvergenceResult& r) {
    os << "# switch_at=" << r.switch_at << ",seeds=" << r.n_seeds << ",smoothing=" << r.smoothing << '\n';
    os << "algorithm,step,mean_sq_error_db\n";
    for (const auto& c : r.curves)
        for (std::size_t t = 0; t < c.smoothed_db.size(); ++t)
            os << c.algorithm << ',' << t << ',' << format_double(c.smoothed_db[t]) << '\n';
}

void write_uncertainty_csv(std::ostream& os, const std::vector<UncertaintyTrace>& traces) {
    os << "algorithm,prefix,x,mean,std\n";
    for (const auto& tr : traces)
        for (std::size_t i = 0; i < tr.grid.size(); ++i)
            os << tr.algorithm << ',' << tr.prefix << ',' << format_double(tr.grid[i]) << ','
               << format_double(tr.mean[i]) << ',' << format_double(tr.std[i]) << '\n';
}

}  // namespace okr
