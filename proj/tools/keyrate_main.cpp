// SPDX-License-Identifier: Apache-2.0
//
// keyrate command-line tool: simulate channel-gain campaigns, analyze traces
// and sweeps into secret-key-rate reports, compute lagged self-dependence
// profiles, and run the built-in oracle battery. All diagnostics go to
// stderr; data goes to files; the exit status is 0 iff no error occurred.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "keyrate/analysis.hpp"
#include "keyrate/channel_sim.hpp"
#include "keyrate/config.hpp"
#include "keyrate/errors.hpp"
#include "keyrate/estimators.hpp"
#include "keyrate/fading.hpp"
#include "keyrate/preprocess.hpp"
#include "keyrate/rng.hpp"
#include "keyrate/trace.hpp"
#include "keyrate/trace_io.hpp"

namespace fs = std::filesystem;
using namespace keyrate;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned threads = 0;
};

RunConfig effective_config(const GlobalOptions& options) {
    RunConfig config;
    if (!options.config_path.empty()) config = load_run_config(options.config_path);
    if (options.seed_given) {
        config.channel.seed = options.seed;
        config.estimator.seed = options.seed;
    }
    return config;
}

fs::path ensure_out_dir(const GlobalOptions& options) {
    const fs::path out(options.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec && !fs::is_directory(out))
        throw IoError("cannot create output directory " + out.string());
    return out;
}

// Traces loaded without a metadata sidecar get their geometry and sampling
// interval from the run configuration.
TraceSet load_trace_with_config(const fs::path& path, const RunConfig& config) {
    TraceSet trace = load_trace(path);
    std::error_code ec;
    if (!fs::exists(path.parent_path() / "meta.toml", ec) || ec) {
        trace.wavelength = config.channel.wavelength;
        trace.ab_distance = config.sweep.ab_distance;
        trace.x.sampling_interval = config.channel.sampling_interval;
        trace.y.sampling_interval = config.channel.sampling_interval;
        trace.z.sampling_interval = config.channel.sampling_interval;
        if (trace.z_secondary)
            trace.z_secondary->sampling_interval = config.channel.sampling_interval;
    }
    if (config.io.use_secondary_eve) use_secondary_eve(trace);
    return trace;
}

int cmd_simulate(const GlobalOptions& options) {
    const RunConfig config = effective_config(options);
    const fs::path out = ensure_out_dir(options);
    const std::vector<double> distances = sweep_distances(config.sweep);
    std::cerr << "simulating " << distances.size() << " positions, "
              << config.sweep.samples_per_step << " samples each (seed " << config.channel.seed
              << ")\n";
    const SweepDataset sweep = simulate_sweep(config.channel, distances,
                                              config.sweep.samples_per_step,
                                              config.sweep.ab_distance, options.threads);
    save_sweep(sweep, out);
    std::cerr << "wrote " << sweep.positions.size() << " position files to " << out.string()
              << "\n";
    return 0;
}

int cmd_analyze(const GlobalOptions& options, const std::string& trace_path) {
    const RunConfig config = effective_config(options);
    const fs::path out = ensure_out_dir(options);
    const TraceSet trace = load_trace_with_config(trace_path, config);

    const PositionMetrics metrics =
        analyze_position(trace, config.pipeline, config.estimator, 0, options.threads);

    SweepReport report;
    report.positions.push_back(metrics);
    report.wavelength = trace.wavelength;
    report.ab_distance = trace.ab_distance;
    report.samples_per_step = trace.length();
    report.pipeline = config.pipeline;
    report.estimator = config.estimator;

    write_report_csv(report, out / "metrics.csv");
    write_report_json(report, out / "metrics.json");
    std::cerr << "analyzed " << trace_path << " (" << trace.length() << " samples) -> "
              << (out / "metrics.csv").string() << "\n";
    return 0;
}

int cmd_sweep(const GlobalOptions& options, const std::string& sweep_dir) {
    const RunConfig config = effective_config(options);
    const fs::path out = ensure_out_dir(options);
    SweepDataset sweep = load_sweep(sweep_dir);
    if (config.io.use_secondary_eve)
        for (TraceSet& trace : sweep.positions) use_secondary_eve(trace);

    std::cerr << "analyzing " << sweep.positions.size() << " positions\n";
    const SweepReport report =
        analyze_sweep(sweep, config.pipeline, config.estimator, options.threads);
    const SummaryTable summary = summarize(report);

    write_report_csv(report, out / "report.csv");
    write_report_json(report, out / "report.json");
    write_summary_csv(summary, out / "summary.csv");
    std::cerr << "wrote report.csv, report.json, summary.csv to " << out.string() << "\n";
    return 0;
}

int cmd_lagmi(const GlobalOptions& options, const std::string& trace_path, std::size_t max_lag,
              const std::string& column) {
    const RunConfig config = effective_config(options);
    const fs::path out = ensure_out_dir(options);
    const TraceSet trace = load_trace_with_config(trace_path, config);

    const TimeSeries* series = nullptr;
    if (column == "x")
        series = &trace.x;
    else if (column == "y")
        series = &trace.y;
    else if (column == "z")
        series = &trace.z;
    else
        throw ConfigError("lagmi: --column must be x, y, or z");

    const auto profile = lag_mi_profile(*series, max_lag, config.estimator.neighbor_k,
                                        config.estimator.jitter_amplitude, config.estimator.seed,
                                        options.threads);

    std::string csv = "lag,mi_bits,neighbor_k,sample_count,jitter_amplitude,jitter_seed\n";
    char buf[96];
    for (const auto& [lag, estimate] : profile) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%zu,%zu,%.17g,%llu\n", lag, estimate.value,
                      estimate.neighbor_k, estimate.sample_count, estimate.jitter_amplitude,
                      static_cast<unsigned long long>(estimate.jitter_seed));
        csv += buf;
    }
    const fs::path path = out / "lag_mi.csv";
    std::ofstream file(path, std::ios::trunc | std::ios::binary);
    if (!file) throw IoError("cannot write " + path.string());
    file << csv;
    std::cerr << "wrote " << profile.size() << " lags to " << path.string() << "\n";
    return 0;
}

// ---- selfcheck ---------------------------------------------------------------

struct CheckResult {
    bool ok = true;
    std::string detail;

    void expect(bool condition, const std::string& why) {
        if (!condition && ok) {
            ok = false;
            detail = why;
        }
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void check_near(CheckResult& result, double actual, double expected, double tolerance,
                const std::string& label) {
    result.expect(std::fabs(actual - expected) <= tolerance,
                  label + ": got " + fmt(actual) + ", expected " + fmt(expected) + " +- " +
                      fmt(tolerance));
}

CheckResult check_bessel(bool inject_fault) {
    CheckResult result;
    check_near(result, bessel_j0(0.0), 1.0, 1e-15, "J0(0)");
    check_near(result, bessel_j0(2.404825557695773), 0.0, 1e-9, "J0(first zero)");
    const double expected_2pi = inject_fault ? 0.5 : 0.22027690853993434;
    check_near(result, bessel_j0(2.0 * 3.14159265358979323846), expected_2pi, 1e-9, "J0(2*pi)");
    check_near(result, bessel_j0(1.0), 0.7651976865579665, 1e-9, "J0(1)");
    check_near(result, bessel_j0(5.0), -0.1775967713143383, 1e-9, "J0(5)");
    check_near(result, bessel_j0(12.3), 0.1107979503075853, 1e-9, "J0(12.3)");
    check_near(result, bessel_j0(50.0), 0.0558123276692518, 1e-9, "J0(50)");
    check_near(result, bessel_j0(-5.0), bessel_j0(5.0), 0.0, "J0 evenness");
    return result;
}

CheckResult check_digamma() {
    CheckResult result;
    check_near(result, digamma(1.0), -0.5772156649015329, 1e-10, "psi(1)");
    check_near(result, digamma(2.0), 0.4227843350984671, 1e-10, "psi(2)");
    check_near(result, digamma(4.0), 1.2561176684318005, 1e-10, "psi(4)");
    check_near(result, digamma(10.5), 2.3030010342976864, 1e-10, "psi(10.5)");
    check_near(result, digamma(100.0), 4.6001618527380874, 1e-10, "psi(100)");
    check_near(result, digamma(3.25), 1.016990911068179, 1e-10, "psi(3.25)");
    return result;
}

CheckResult check_gaussian_mi() {
    CheckResult result;
    check_near(result, gaussian_mi_closed_form(0.0), 0.0, 1e-15, "MI(0)");
    check_near(result, gaussian_mi_closed_form(0.5), 0.2075187496394219, 1e-12, "MI(0.5)");
    check_near(result, gaussian_mi_closed_form(0.9), 1.1979643381655696, 1e-12, "MI(0.9)");
    check_near(result, gaussian_mi_closed_form(0.99), 2.8255438795029003, 1e-12, "MI(0.99)");
    return result;
}

CheckResult check_pearson() {
    CheckResult result;
    check_near(result, pearson({1, 2, 3}, {1, 2, 4}), 0.9819805060619659, 1e-12, "hand case");
    check_near(result, pearson({1, 2, 3, 5}, {1, 2, 3, 5}), 1.0, 1e-12, "perfect correlation");
    check_near(result, pearson({1, 2, 3, 5}, {-1, -2, -3, -5}), -1.0, 1e-12, "perfect inverse");
    return result;
}

// Dense Toeplitz solve by Gaussian elimination with partial pivoting, as an
// independent oracle for the order-recursive solver.
std::vector<double> dense_toeplitz_solve(const std::vector<double>& r) {
    const std::size_t p = r.size() - 1;
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j)
            a[i][j] = r[static_cast<std::size_t>(std::llabs(static_cast<long long>(i) -
                                                            static_cast<long long>(j)))];
        a[i][p] = r[i + 1];
    }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < p; ++row)
            if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
        std::swap(a[col], a[pivot]);
        for (std::size_t row = col + 1; row < p; ++row) {
            const double factor = a[row][col] / a[col][col];
            for (std::size_t j = col; j <= p; ++j) a[row][j] -= factor * a[col][j];
        }
    }
    std::vector<double> solution(p);
    for (std::size_t i = p; i-- > 0;) {
        double acc = a[i][p];
        for (std::size_t j = i + 1; j < p; ++j) acc -= a[i][j] * solution[j];
        solution[i] = acc / a[i][i];
    }
    return solution;
}

CheckResult check_predictor_recursion() {
    CheckResult result;

    // Closed-form first-order case: r = [4/3, 2/3] -> a1 = 0.5, residual 1.
    const PredictorModel ar1 = levinson_durbin({4.0 / 3.0, 2.0 / 3.0});
    check_near(result, ar1.coefficients[0], 0.5, 1e-12, "first-order coefficient");
    check_near(result, ar1.residual_variance, 1.0, 1e-12, "first-order residual");

    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 20 && result.ok; ++trial) {
        const std::size_t order = 1 + static_cast<std::size_t>(rng() % 20);
        // Positive spectral measure guarantees a positive-definite sequence.
        std::vector<double> r(order + 1, 0.0);
        const int tones = 3 + static_cast<int>(rng() % 4);
        for (int t = 0; t < tones; ++t) {
            const double weight = 0.2 + uniform_unit(rng);
            const double omega = 3.14159265358979323846 * uniform_unit(rng);
            for (std::size_t l = 0; l <= order; ++l)
                r[l] += weight * std::cos(omega * static_cast<double>(l));
        }
        r[0] += 0.1;  // ridge keeps the system well-conditioned

        const PredictorModel model = levinson_durbin(r);
        const std::vector<double> oracle = dense_toeplitz_solve(r);
        for (std::size_t i = 0; i < order; ++i) {
            const double scale = std::max(1.0, std::fabs(oracle[i]));
            check_near(result, model.coefficients[i], oracle[i], 1e-8 * scale,
                       "system " + std::to_string(trial) + " coefficient " + std::to_string(i));
        }
    }
    return result;
}

CheckResult check_near_field() {
    CheckResult result;
    check_near(result, near_field_boundary(0.06, 0.125), 0.0576, 1e-15, "0.06 m antenna");
    check_near(result, near_field_boundary(0.0, 0.125), 0.0, 0.0, "point antenna");
    return result;
}

CheckResult check_key_rate_formula() {
    CheckResult result;
    check_near(result, secret_key_rate(2.89, 0.27, 0.27), 2.62, 1e-12, "symmetric leakage");
    check_near(result, secret_key_rate(1.0, 0.4, 0.9), 0.6, 1e-12, "min selection");
    check_near(result, secret_key_rate(1.5, 0.0, 0.0), 1.5, 1e-12, "no leakage");
    return result;
}

CheckResult check_knn_estimator() {
    CheckResult result;
    GaussianSampler gauss(99);
    const std::size_t n = 2000;
    const double rho = 0.9;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = gauss(), v = gauss();
        x[i] = u;
        y[i] = rho * u + std::sqrt(1 - rho * rho) * v;
    }
    const MIEstimate estimate = ksg_mutual_information(x, y, 4, 0.0, 7);
    check_near(result, estimate.value, gaussian_mi_closed_form(rho), 0.1,
               "correlated Gaussian pair, N=2000");
    return result;
}

int cmd_selfcheck(bool inject_fault) {
    struct NamedCheck {
        const char* name;
        CheckResult result;
    };
    const NamedCheck checks[] = {
        {"bessel reference values", check_bessel(inject_fault)},
        {"digamma reference values", check_digamma()},
        {"gaussian mutual information closed form", check_gaussian_mi()},
        {"pearson hand-computed cases", check_pearson()},
        {"predictor recursion vs dense solver", check_predictor_recursion()},
        {"near-field boundary", check_near_field()},
        {"secret-key-rate formula", check_key_rate_formula()},
        {"k-NN mutual information sanity", check_knn_estimator()},
    };
    bool all_ok = true;
    for (const auto& check : checks) {
        if (check.result.ok) {
            std::cerr << "[pass] " << check.name << "\n";
        } else {
            std::cerr << "[FAIL] " << check.name << ": " << check.result.detail << "\n";
            all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"keyrate: secret-key-rate analysis for reciprocal channel-gain traces"};
    app.require_subcommand(1);
    // Accept the shared options on either side of the subcommand name.
    app.fallthrough();

    GlobalOptions options;
    app.add_option("--config", options.config_path, "Run configuration file")
        ->check(CLI::ExistingFile);
    app.add_option("--out", options.out_dir, "Output directory (default .)");
    auto* seed_opt = app.add_option("--seed", options.seed, "Override the campaign seed");
    app.add_option("--threads", options.threads, "Worker threads (0 = hardware)");

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic sweep campaign");

    std::string trace_path;
    auto* analyze = app.add_subcommand("analyze", "Analyze one trace file");
    analyze->add_option("trace", trace_path, "Trace CSV path")->required();

    std::string sweep_dir;
    auto* sweep = app.add_subcommand("sweep", "Analyze a sweep directory");
    sweep->add_option("dir", sweep_dir, "Sweep directory")->required();

    std::string lagmi_trace;
    std::size_t max_lag = 100;
    std::string column = "x";
    auto* lagmi = app.add_subcommand("lagmi", "Lagged self-dependence profile of one trace");
    lagmi->add_option("trace", lagmi_trace, "Trace CSV path")->required();
    app.add_option("--max-lag", max_lag, "Largest lag to evaluate (default 100)");
    lagmi->add_option("--column", column, "Trace column to profile: x|y|z (default x)");

    bool inject_fault = false;
    auto* selfcheck = app.add_subcommand("selfcheck", "Run the built-in oracle battery");
    selfcheck->add_flag("--inject-fault", inject_fault, "Force one check to fail (harness test)")
        ->group("");  // hidden

    CLI11_PARSE(app, argc, argv);
    options.seed_given = seed_opt->count() > 0;

    try {
        if (simulate->parsed()) return cmd_simulate(options);
        if (analyze->parsed()) return cmd_analyze(options, trace_path);
        if (sweep->parsed()) return cmd_sweep(options, sweep_dir);
        if (lagmi->parsed()) return cmd_lagmi(options, lagmi_trace, max_lag, column);
        if (selfcheck->parsed()) return cmd_selfcheck(inject_fault);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
