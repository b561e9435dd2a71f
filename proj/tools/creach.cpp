// creach: reachable set estimation from Monte Carlo simulation data via
// sublevel sets of the empirical inverse Christoffel function.
//
// Exit codes: 0 success, 1 usage/config error, 2 probabilistic guarantee not
// witnessed by validation, 3 numerical failure.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "creach/creach.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_not_witnessed = 2;
constexpr int exit_numerical = 3;

struct common_flags {
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

void add_seed_flag(CLI::App* cmd, common_flags& flags) {
    cmd->add_option_function<std::uint64_t>(
           "--seed",
           [&flags](const std::uint64_t& v) {
               flags.seed = v;
               flags.seed_set = true;
           },
           "Override the seed from the config");
}

std::string join_vector(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += creach::format_double(v[i]);
    }
    return out;
}

int run_sample_size(double epsilon, double delta, int n, int k) {
    const std::uint64_t n_samples = creach::pac_sample_size({epsilon, delta, n, k});
    std::cout << n_samples << "\n";
    return exit_ok;
}

int run_estimate(const std::string& config_path, const common_flags& flags,
                 const std::optional<std::string>& out_path,
                 const std::optional<std::string>& cloud_out_path) {
    const auto started = std::chrono::steady_clock::now();
    creach::run_config cfg = creach::load_run_config(config_path);
    const std::uint64_t seed = flags.seed_set ? flags.seed : cfg.seed_train;
    const std::uint64_t n_samples = cfg.sample_count();

    std::cerr << "estimate: system=" << creach::to_string(cfg.problem.system.id)
              << " n=" << cfg.problem.effective_dim() << " k=" << cfg.k
              << " N=" << n_samples << " seed=" << seed << "\n";

    creach::sample_cloud cloud =
        creach::generate_cloud(cfg.problem, n_samples, seed, flags.threads);
    creach::christoffel_estimator est = creach::fit(cloud, cfg.k, flags.threads);

    creach::fit_meta meta = est.meta();
    meta.epsilon = cfg.epsilon;
    meta.delta = cfg.delta;
    creach::christoffel_estimator out_est(est.basis(), est.normalization(),
                                          est.chol_lower(), est.alpha(), meta);

    const std::string est_path =
        out_path ? *out_path : cfg.out_estimator.value_or("estimator.json");
    creach::write_estimator(est_path, out_est);

    std::optional<std::string> cloud_path = cloud_out_path;
    if (!cloud_path && cfg.out_cloud) cloud_path = cfg.out_cloud;
    if (cloud_path) {
        std::vector<std::string> names;
        if (!cfg.problem.projection.empty())
            for (int idx : cfg.problem.projection)
                names.push_back("x" + std::to_string(idx + 1));
        creach::write_cloud(*cloud_path, cloud, names);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::cerr << "estimate: m=" << est.basis().size()
              << " alpha=" << creach::format_double(est.alpha())
              << " jitter=" << creach::format_double(est.meta().jitter)
              << " wall=" << creach::format_double(wall) << "s -> " << est_path << "\n";
    return exit_ok;
}

int run_validate(const std::string& estimator_path, const std::string& config_path,
                 double margin, double confidence, const common_flags& flags,
                 const std::string& out_prefix, bool self, bool keep_outliers) {
    creach::run_config cfg = creach::load_run_config(config_path);
    creach::christoffel_estimator est = creach::read_estimator(estimator_path);
    if (cfg.problem.effective_dim() != est.basis().n())
        throw creach::config_error(
            "validate: config's effective dimension does not match the estimator");

    const creach::chernoff_params chern{margin, confidence};
    creach::accuracy_report report;
    if (self) {
        if (est.meta().problem_digest != creach::problem_digest(cfg.problem))
            throw creach::config_error(
                "validate --self: config does not describe the estimator's training problem "
                "(digest mismatch)");
        creach::sample_cloud training = creach::generate_cloud(
            cfg.problem, est.meta().sample_count, est.meta().seed, flags.threads);
        report = creach::validate_on_cloud(est, training, chern, flags.threads, keep_outliers);
    } else {
        const std::uint64_t seed = flags.seed_set ? flags.seed : cfg.seed_validate;
        report = creach::validate(est, cfg.problem, chern, seed, flags.threads, keep_outliers);
    }

    creach::write_report(out_prefix, report);
    std::cerr << "validate: n_ap=" << report.n_ap << " n_out=" << report.n_out
              << " empirical=" << creach::format_double(report.empirical_accuracy)
              << " certified>=" << creach::format_double(report.certified_lower_bound)
              << " -> " << out_prefix << ".{txt,json}\n";

    const double epsilon = std::isfinite(est.meta().epsilon) ? est.meta().epsilon : cfg.epsilon;
    if (report.certified_lower_bound >= 1.0 - epsilon) return exit_ok;
    std::cerr << "validate: certified lower bound "
              << creach::format_double(report.certified_lower_bound)
              << " is below the 1-epsilon target "
              << creach::format_double(1.0 - epsilon) << "\n";
    return exit_not_witnessed;
}

int run_grid(const std::string& estimator_path, double x1min, double x1max, double x2min,
             double x2max, int rows, int cols, const std::string& out_path) {
    creach::christoffel_estimator est = creach::read_estimator(estimator_path);
    creach::write_grid(out_path, est, x1min, x1max, x2min, x2max, rows, cols);
    std::cerr << "grid: " << rows << "x" << cols << " -> " << out_path << "\n";
    return exit_ok;
}

int run_interval(const std::string& config_path) {
    creach::run_config cfg = creach::load_run_config(config_path);
    if (cfg.problem.system.id != creach::system_id::traffic)
        throw creach::config_error(
            "interval: only the monotone traffic system supports the tight interval "
            "over-approximation; got '" + creach::to_string(cfg.problem.system.id) + "'");

    const creach::box d = cfg.problem.disturbance.value_or(creach::box{});
    const creach::state_interval iv = creach::monotone_interval(
        cfg.problem.system, cfg.problem.integ, cfg.problem.t0, cfg.problem.t1,
        cfg.problem.x0.lower, cfg.problem.x0.upper, d.lower, d.upper);

    std::cout << "lower: " << join_vector(iv.lower) << "\n";
    std::cout << "upper: " << join_vector(iv.upper) << "\n";
    if (!cfg.problem.projection.empty()) {
        std::vector<double> plo, phi;
        for (int idx : cfg.problem.projection) {
            plo.push_back(iv.lower[idx]);
            phi.push_back(iv.upper[idx]);
        }
        std::cout << "projected lower: " << join_vector(plo) << "\n";
        std::cout << "projected upper: " << join_vector(phi) << "\n";
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven reachable set estimation with Christoffel functions"};
    app.require_subcommand(1);

    common_flags flags;

    // sample-size
    auto* sample_size = app.add_subcommand(
        "sample-size", "Print the sample count that backs the PAC guarantee");
    double ss_epsilon = 0.0, ss_delta = 0.0;
    int ss_n = 0, ss_k = 0;
    sample_size->add_option("--epsilon", ss_epsilon, "Accuracy in (0,1)")->required();
    sample_size->add_option("--delta", ss_delta, "1 - confidence, in (0,1)")->required();
    sample_size->add_option("--n", ss_n, "State dimension after projection")->required();
    sample_size->add_option("--k", ss_k, "Christoffel order")->required();

    // estimate
    auto* estimate = app.add_subcommand(
        "estimate", "Sample the system and fit the sublevel-set estimator");
    std::string est_config;
    std::optional<std::string> est_out, est_cloud_out;
    estimate->add_option("--config", est_config, "Run configuration (JSON)")->required();
    estimate->add_option("--out", est_out, "Estimator document path");
    estimate->add_option("--cloud-out", est_cloud_out, "Also write the training cloud (CSV)");
    estimate->add_option("--threads", flags.threads, "Worker threads (0 = auto)");
    add_seed_flag(estimate, flags);

    // validate
    auto* validate = app.add_subcommand(
        "validate", "A-posteriori accuracy estimate on fresh samples");
    std::string val_estimator, val_config, val_out = "report";
    double val_margin = 0.01, val_confidence = 0.9999;
    bool val_self = false, val_keep_outliers = false;
    validate->add_option("--estimator", val_estimator, "Estimator document")->required();
    validate->add_option("--config", val_config, "Run configuration (JSON)")->required();
    validate->add_option("--margin", val_margin, "Chernoff margin in (0,1)");
    validate->add_option("--confidence", val_confidence, "Chernoff confidence in (0,1)");
    validate->add_option("--out", val_out, "Report path prefix (writes .txt and .json)");
    validate->add_flag("--self", val_self,
                       "Validate on the regenerated training cloud instead of fresh samples");
    validate->add_flag("--keep-outliers", val_keep_outliers,
                       "Record misclassified points in the report");
    validate->add_option("--threads", flags.threads, "Worker threads (0 = auto)");
    add_seed_flag(validate, flags);

    // grid
    auto* grid = app.add_subcommand(
        "grid", "Export C(x) and membership on a rectangular grid (2-D estimators)");
    std::string grid_estimator, grid_out = "grid.csv";
    double g_x1min = 0, g_x1max = 0, g_x2min = 0, g_x2max = 0;
    int g_rows = 0, g_cols = 0;
    grid->add_option("--estimator", grid_estimator, "Estimator document")->required();
    grid->add_option("--x1min", g_x1min)->required();
    grid->add_option("--x1max", g_x1max)->required();
    grid->add_option("--x2min", g_x2min)->required();
    grid->add_option("--x2max", g_x2max)->required();
    grid->add_option("--rows", g_rows, "Grid rows (x2 direction)")->required();
    grid->add_option("--cols", g_cols, "Grid cols (x1 direction)")->required();
    grid->add_option("--out", grid_out, "Grid file path");

    // interval
    auto* interval = app.add_subcommand(
        "interval", "Tight interval over-approximation for the monotone traffic system");
    std::string int_config;
    interval->add_option("--config", int_config, "Run configuration (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*sample_size) return run_sample_size(ss_epsilon, ss_delta, ss_n, ss_k);
        if (*estimate) return run_estimate(est_config, flags, est_out, est_cloud_out);
        if (*validate)
            return run_validate(val_estimator, val_config, val_margin, val_confidence, flags,
                                val_out, val_self, val_keep_outliers);
        if (*grid)
            return run_grid(grid_estimator, g_x1min, g_x1max, g_x2min, g_x2max, g_rows,
                            g_cols, grid_out);
        if (*interval) return run_interval(int_config);
    } catch (const creach::insufficient_samples& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const creach::singular_moment& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const creach::nonfinite_state& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const creach::monotonicity_violated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
