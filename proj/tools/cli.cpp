#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "okr/datasets.hpp"
#include "okr/errors.hpp"
#include "okr/evaluation.hpp"
#include "okr/regressor.hpp"
#include "okr/verify.hpp"

namespace okr::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string command;
    std::string config_file;

    // kernel
    std::optional<double> lengthscale;
    std::optional<double> signal_variance;
    std::optional<double> noise_var;
    std::optional<double> jitter;

    // algorithms
    std::string algs;
    double beta = 1.0;
    std::optional<double> eta;
    std::optional<double> eps_reg;
    double quant_radius = 0.1;
    double coherence_mu0 = 1.0;
    std::optional<std::size_t> budget;
    std::optional<double> admission_threshold;

    // data
    std::string gen;
    std::string csv;
    std::string test_csv;
    bool header = false;
    bool standardize = false;
    std::optional<std::size_t> dim;
    std::optional<std::size_t> n;
    std::optional<std::size_t> n_test;
    std::optional<std::size_t> seeds;
    std::uint64_t seed = 1;
    std::size_t eval_every = 100;

    // reconvergence
    std::size_t switch_at = 500;
    std::size_t smoothing = 20;
    double noise_std = 0.01;
    std::size_t channel_length = 4;
    std::string channel_model = "gaussian";

    // uncertainty
    std::vector<std::size_t> prefixes{3, 8, 25};
    std::size_t grid_points = 201;

    // verify
    std::optional<double> tol;
    double perturb_noise = 0.0;

    std::string out = "out";
    bool dump_state = false;
};

/// Kernel used when no flag overrides a field; tuned per experiment.
KernelSpec kernel_from(const Options& o, KernelSpec defaults) {
    KernelSpec k = defaults;
    if (o.lengthscale) k.lengthscale = *o.lengthscale;
    if (o.signal_variance) k.signal_variance = *o.signal_variance;
    if (o.noise_var) k.noise_variance = *o.noise_var;
    k.jitter = o.jitter.value_or(KernelSpec::default_jitter(k.signal_variance));
    k.validate();
    return k;
}

// Q is propagated by rank-1 steps that divide by γ², so rounding grows like
// 1/γ². Time-delay embeddings produce many near-duplicates and need a higher
// floor than i.i.d. inputs.
AlgorithmDefaults algorithm_defaults(const Options& o, double default_admission) {
    AlgorithmDefaults d;
    d.eta = o.eta;
    d.beta = o.beta;
    d.eps_reg = o.eps_reg;
    d.quant_radius = o.quant_radius;
    d.coherence_mu0 = o.coherence_mu0;
    d.budget = o.budget;
    d.admission_threshold = o.admission_threshold.value_or(default_admission);
    return d;
}

fs::path prepare_out_dir(const Options& o) {
    const fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + o.out + "'");
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f << content;
    f.close();
    if (!f) throw IoError("write failed for '" + path.string() + "'");
}

std::string sanitize(std::string label) {
    for (auto& c : label)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')) c = '_';
    return label;
}

void require_existing(const std::string& path) {
    if (!fs::is_regular_file(path)) throw ArgumentError("input file '" + path + "' does not exist");
}

int cmd_compare(const Options& o, std::ostream& out) {
    KernelSpec defaults;
    defaults.lengthscale = 2.0;
    defaults.signal_variance = 1.0;
    defaults.noise_variance = 0.1;
    const KernelSpec spec = kernel_from(o, defaults);
    const auto algorithms = parse_algorithm_list(o.algs.empty() ? "gp,beta:0,beta:1,klms,knlms" : o.algs,
                                                 algorithm_defaults(o, 1e-8), spec);

    std::vector<CompareReplicate> reps;
    if (!o.csv.empty()) {
        require_existing(o.csv);
        if (!o.test_csv.empty()) require_existing(o.test_csv);
        if (!o.dim) throw ArgumentError("--csv requires --dim");
        CompareReplicate rep;
        RegressionSet all = load_csv(o.csv, *o.dim, o.header);
        if (!o.test_csv.empty()) {
            rep.train = std::move(all);
            rep.test = load_csv(o.test_csv, *o.dim, o.header);
        } else {
            if (all.size() < 2) throw ArgumentError("'" + o.csv + "' needs at least two rows to split train/test");
            const std::size_t half = all.size() / 2;
            rep.train = all.slice(0, half);
            rep.test = all.slice(half, all.size() - half);
        }
        if (o.n && *o.n < rep.train.size()) rep.train = rep.train.slice(0, *o.n);
        if (o.standardize) standardize_inputs(rep.train, rep.test);
        reps.push_back(std::move(rep));
    } else {
        const std::string gen = o.gen.empty() ? "kin-like" : o.gen;
        if (gen != "kin-like") throw ArgumentError("unknown generator '" + gen + "' for compare (expected kin-like)");
        const std::size_t n = o.n.value_or(1000);
        const std::size_t n_test = o.n_test.value_or(n);
        const std::size_t d = o.dim.value_or(8);
        for (std::size_t s = 0; s < o.seeds.value_or(1); ++s) {
            auto [train, test] = gen_kinematics_like(o.seed + s, n, n_test, d);
            if (o.standardize) standardize_inputs(train, test);
            reps.push_back({o.seed + s, std::move(train), std::move(test)});
        }
    }
    if (reps.empty()) throw ArgumentError("--seeds must be >= 1");

    const fs::path dir = prepare_out_dir(o);
    std::vector<std::string> snapshots(algorithms.size());
    ModelObserver observer;
    if (o.dump_state) {
        observer = [&](std::size_t a, std::size_t r, const OnlineRegressor& model) {
            if (r != 0) return;
            std::ostringstream ss;
            model.write_snapshot(ss);
            snapshots[a] = ss.str();
        };
    }
    const auto curves = run_compare(algorithms, spec, reps, o.eval_every, observer);

    std::vector<LearningCurve> averaged;
    for (const auto& per_alg : curves) averaged.push_back(average_curves(per_alg));
    std::ostringstream csv;
    write_learning_curves_csv(csv, averaged);
    write_file(dir / "learning_curve.csv", csv.str());
    if (o.dump_state) {
        for (std::size_t a = 0; a < algorithms.size(); ++a)
            write_file(dir / ("state_" + sanitize(algorithms[a].label) + ".txt"), snapshots[a]);
    }

    out << "final NMSE (dB), mean over " << reps.size() << " replicate(s):\n";
    for (const auto& c : averaged) out << "  " << c.algorithm << ": " << c.points.back().nmse_db << '\n';
    out << "wrote " << (dir / "learning_curve.csv").string() << '\n';
    return kOk;
}

int cmd_reconverge(const Options& o, std::ostream& out) {
    KernelSpec defaults;
    defaults.lengthscale = 0.5;
    defaults.signal_variance = 0.05;
    defaults.noise_variance = 0.3;
    const KernelSpec spec = kernel_from(o, defaults);
    const auto algorithms = parse_algorithm_list(o.algs.empty() ? "beta:0,beta:1,klms,knlms,qklms" : o.algs,
                                                 algorithm_defaults(o, 1e-4 * spec.signal_variance), spec);
    if (!o.csv.empty()) throw ArgumentError("reconverge uses the channel-switch generator; --csv is not supported");
    if (!o.gen.empty() && o.gen != "switch") throw ArgumentError("unknown generator '" + o.gen + "' for reconverge");

    ReconvergenceConfig rc;
    rc.scenario.n_total = o.n.value_or(1000);
    rc.scenario.switch_at = o.switch_at;
    rc.scenario.noise_std = o.noise_std;
    rc.scenario.embedding_dim = o.dim.value_or(4);
    rc.channel_length = o.channel_length;
    rc.channel_model = parse_channel_model(o.channel_model);
    rc.n_seeds = o.seeds.value_or(5);
    rc.base_seed = o.seed;
    rc.smoothing = o.smoothing;
    rc.scenario.channel_a = rc.scenario.channel_b = {1.0};
    rc.scenario.validate();

    const auto result = run_reconvergence(rc, algorithms, spec);
    const fs::path dir = prepare_out_dir(o);
    std::ostringstream csv;
    write_reconvergence_csv(csv, result);
    write_file(dir / "reconvergence.csv", csv.str());

    const std::size_t sw = rc.scenario.switch_at;
    const std::size_t T = rc.scenario.n_total;
    out << "mean squared error around the switch at t=" << sw << " (" << rc.n_seeds << " seeds):\n";
    for (const auto& c : result.curves) {
        out << "  " << c.algorithm << ": before=" << window_mean(c.mean_sq_error, sw >= 50 ? sw - 50 : 0, sw - 1)
            << " after=" << window_mean(c.mean_sq_error, sw, std::min(sw + 10, T - 1))
            << " settling=" << window_mean(c.mean_sq_error, sw, std::min(sw + 100, T - 1))
            << " final=" << window_mean(c.mean_sq_error, T > 100 ? T - 100 : 0, T - 1) << '\n';
    }
    out << "wrote " << (dir / "reconvergence.csv").string() << '\n';
    return kOk;
}

int cmd_uncertainty(const Options& o, std::ostream& out) {
    KernelSpec defaults;
    defaults.lengthscale = 0.5;
    defaults.signal_variance = 1.0;
    defaults.noise_variance = 0.01;
    const KernelSpec spec = kernel_from(o, defaults);

    std::size_t max_prefix = 0;
    for (auto p : o.prefixes) max_prefix = std::max(max_prefix, p);
    RegressionSet data;
    if (!o.csv.empty()) {
        require_existing(o.csv);
        if (o.dim && *o.dim != 1) throw ArgumentError("uncertainty needs 1-D inputs (--dim 1)");
        data = load_csv(o.csv, 1, o.header);
    } else {
        if (!o.gen.empty() && o.gen != "sinc1d") throw ArgumentError("unknown generator '" + o.gen + "' for uncertainty");
        data = gen_sinc_1d(o.seed, o.n.value_or(max_prefix));
    }
    if (data.size() == 0) throw ArgumentError("uncertainty: no observations");

    double lo = data.inputs[0][0], hi = lo;
    for (std::size_t i = 0; i < data.size(); ++i) {
        lo = std::min(lo, data.inputs[i][0]);
        hi = std::max(hi, data.inputs[i][0]);
    }
    const double pad = 0.25 * (hi - lo) + spec.lengthscale;
    if (o.grid_points < 2) throw ArgumentError("--grid must be >= 2");
    std::vector<double> grid(o.grid_points);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = (lo - pad) + (hi - lo + 2 * pad) * static_cast<double>(i) / static_cast<double>(grid.size() - 1);

    const auto traces = run_uncertainty_trace(data, o.prefixes, grid, spec);
    const fs::path dir = prepare_out_dir(o);
    std::ostringstream csv;
    write_uncertainty_csv(csv, traces);
    write_file(dir / "uncertainty.csv", csv.str());
    out << "wrote " << traces.size() << " traces to " << (dir / "uncertainty.csv").string() << '\n';
    return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
    VerifyOptions vo;
    vo.seed = o.seed;
    vo.tol = o.tol;
    vo.noise_mismatch = o.perturb_noise;
    const auto results = run_verification(vo);
    print_check_table(out, results);
    bool all = true;
    for (const auto& r : results) all = all && r.pass;
    out << (all ? "all checks passed" : "verification FAILED") << '\n';
    return all ? kOk : kVerificationFailed;
}

void add_common_options(CLI::App& app, Options& o) {
    app.add_option("--kernel-lengthscale", o.lengthscale, "Gaussian kernel lengthscale");
    app.add_option("--kernel-variance", o.signal_variance, "kernel signal variance k(x,x)");
    app.add_option("--noise-var", o.noise_var, "observation noise variance");
    app.add_option("--jitter", o.jitter, "Gram diagonal jitter (default 1e-10 * signal variance)");
    app.add_option("--algs", o.algs, "comma-separated algorithms: gp[:budget], beta[:b], klms[:eta], qklms[:radius], knlms[:mu0]");
    app.add_option("--beta", o.beta, "beta for bare 'beta' entries")->capture_default_str();
    app.add_option("--eta", o.eta, "learning rate for klms/qklms/knlms");
    app.add_option("--eps-reg", o.eps_reg, "KNLMS regularizer (default: noise variance)");
    app.add_option("--quant-radius", o.quant_radius, "QKLMS quantization radius")->capture_default_str();
    app.add_option("--coherence-mu0", o.coherence_mu0, "KNLMS coherence threshold, fraction of k(x,x)")->capture_default_str();
    app.add_option("--budget", o.budget, "GP dictionary budget (oldest evicted first)");
    app.add_option("--admission-threshold", o.admission_threshold, "GP novelty threshold for admission (compare: 1e-8, reconverge: 1e-4 * signal variance)");
    app.add_option("--gen", o.gen, "data generator: kin-like (compare), switch (reconverge), sinc1d (uncertainty)");
    app.add_option("--csv", o.csv, "read data from a CSV file instead of a generator");
    app.add_option("--test-csv", o.test_csv, "separate test CSV for compare");
    app.add_flag("--header", o.header, "skip the first CSV row");
    app.add_flag("--standardize", o.standardize, "standardize input columns with training statistics");
    app.add_option("--dim", o.dim, "input dimension (CSV, generator or embedding)");
    app.add_option("--n", o.n, "training size / stream length");
    app.add_option("--n-test", o.n_test, "test-set size for generated data");
    app.add_option("--seeds", o.seeds, "number of replicates");
    app.add_option("--seed", o.seed, "first replicate seed")->capture_default_str();
    app.add_option("--eval-every", o.eval_every, "test-set evaluation period")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--switch-at", o.switch_at, "step at which the channel switches")->capture_default_str();
    app.add_option("--smoothing", o.smoothing, "moving-average window for reconvergence curves")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--noise-std", o.noise_std, "additive noise of the switch series")->capture_default_str();
    app.add_option("--channel-length", o.channel_length, "FIR taps per channel")->capture_default_str();
    app.add_option("--channel-model", o.channel_model, "random channel taps: gaussian | minphase")->capture_default_str();
    app.add_option("--prefixes", o.prefixes, "prefix sizes for the uncertainty traces")->delimiter(',');
    app.add_option("--grid", o.grid_points, "grid points for the uncertainty traces")->capture_default_str();
    app.add_option("--tol", o.tol, "override every verification tolerance");
    app.add_option("--perturb-noise", o.perturb_noise, "add this to KNLMS eps in identity B (negative control)");
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_flag("--dump-state", o.dump_state, "write final model snapshots (compare)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Online GP regression and the KLMS family: experiments and self-checks", "okr"};
    app.set_config("--config", "", "key=value configuration file; flags override it");
    // keep `algs=gp,beta:0` as one value; list options split on their own delimiter
    app.get_config_formatter_base()->arrayDelimiter(';');
    add_common_options(app, o);
    app.require_subcommand(1);
    for (auto [name, help] : {std::pair{"compare", "learning curves on stationary data"},
                              std::pair{"reconverge", "prediction error around an abrupt channel switch"},
                              std::pair{"uncertainty", "predictive-variance traces on 1-D data"},
                              std::pair{"verify", "run the equivalence checks"}}) {
        app.add_subcommand(name, help)->fallthrough()->callback([&o, n = std::string(name)] { o.command = n; });
    }

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (o.command == "compare") return cmd_compare(o, out);
        if (o.command == "reconverge") return cmd_reconverge(o, out);
        if (o.command == "uncertainty") return cmd_uncertainty(o, out);
        if (o.command == "verify") return cmd_verify(o, out);
        err << "error: no command\n";
        return kUsageError;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    }
}

}  // namespace okr::cli
