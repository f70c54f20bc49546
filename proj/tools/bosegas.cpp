// Command-line frontend: experiment dispatch, CSV/SVG emission, oracle
// verification. Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 I/O.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bosegas/config.hpp"
#include "bosegas/csv.hpp"
#include "bosegas/errors.hpp"
#include "bosegas/experiments.hpp"
#include "bosegas/svg.hpp"
#include "bosegas/verify.hpp"

namespace {

namespace fs = std::filesystem;
using namespace bosegas;

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    int threads = -1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("-c,--config", opt.config_path, "configuration file (key = value sections)")
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", opt.out_dir, "output directory (created if missing)");
    cmd->add_option("-j,--threads", opt.threads,
                    "parallelism degree (default: BOSEGAS_THREADS or hardware)");
    cmd->add_option("--set", opt.overrides, "override a config key, e.g. --set L0=60")
        ->take_all();
}

cli::ExperimentConfig load_config(const CommonOptions& opt, cli::ExperimentKind kind) {
    std::vector<std::string> overrides = opt.overrides;
    if (opt.threads >= 0) overrides.push_back("threads=" + std::to_string(opt.threads));
    return cli::parse_config(opt.config_path, kind, overrides);
}

void write_outputs(const CommonOptions& opt, const cli::ExperimentConfig& cfg,
                   const std::vector<std::pair<std::string, cli::CsvTable>>& tables) {
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + opt.out_dir + "'");
    const std::string kind = cli::to_string(cfg.kind);
    {
        const fs::path cfg_path = fs::path(opt.out_dir) / (kind + ".effective.cfg");
        std::ofstream out(cfg_path, std::ios::binary);
        if (!out) throw IoError("cannot write '" + cfg_path.string() + "'");
        out << cli::serialize_config(cfg);
    }
    for (const auto& [name, table] : tables) {
        const fs::path path = fs::path(opt.out_dir) / (name + ".csv");
        cli::write_csv(path.string(), table);
        std::printf("wrote %s (%zu rows)\n", path.string().c_str(), table.rows.size());
    }
}

int run_locality(const CommonOptions& opt) {
    const auto cfg = load_config(opt, cli::ExperimentKind::locality);
    const auto rows = experiments::locality_sweep(cfg.locality);

    // per-temperature fits, each in the regime its side of the transition
    // calls for; an unsatisfiable window skips that fit, not the run
    std::map<double, std::vector<experiments::LocalityRow>> by_t;
    for (const auto& r : rows) by_t[r.t].push_back(r);
    std::vector<experiments::FitRow> fits;
    for (const auto& [t, group] : by_t) {
        const auto regime = t <= experiments::kCriticalTemperature
                                ? experiments::Regime::below
                                : experiments::Regime::above;
        try {
            for (auto& f : experiments::fit_locality(group, regime)) fits.push_back(std::move(f));
        } catch (const NumericError& e) {
            std::fprintf(stderr, "note: no decay fit at T = %g (%s)\n", t, e.what());
        }
    }

    write_outputs(opt, cfg,
                  {{"locality", cli::locality_table(rows, "locality")},
                   {"locality_fits", cli::fits_table(fits, "locality")}});
    return kExitOk;
}

int run_profile(const CommonOptions& opt) {
    const auto cfg = load_config(opt, cli::ExperimentKind::profile);
    const auto res = experiments::temperature_profile(cfg.profile);
    write_outputs(opt, cfg,
                  {{"profile", cli::locality_table(res.rows, "profile")},
                   {"profile_minima", cli::minima_table(res.minima)},
                   {"profile_fits", cli::fits_table(res.fits, "profile")}});
    return kExitOk;
}

int run_phase(const CommonOptions& opt) {
    const auto cfg = load_config(opt, cli::ExperimentKind::phase);
    const auto res = experiments::phase_transition_scan(cfg.phase);
    write_outputs(opt, cfg,
                  {{"phase", cli::phase_table(res.rows)},
                   {"phase_fits", cli::fits_table(res.fits, "phase")}});
    std::printf("T_c(1/L -> 0) = %.4f +- %.4f\n", res.tc_infinity, res.tc_infinity_err);
    return kExitOk;
}

int run_correlations(const CommonOptions& opt) {
    const auto cfg = load_config(opt, cli::ExperimentKind::correlations);
    const auto res = experiments::correlation_scan(cfg.correlations);
    write_outputs(opt, cfg,
                  {{"correlations", cli::correlations_table(res.rows)},
                   {"correlations_fits", cli::fits_table(res.fits, "correlations")}});
    return kExitOk;
}

int run_subsystems(const CommonOptions& opt) {
    const auto cfg = load_config(opt, cli::ExperimentKind::subsystems);
    const auto rows = experiments::subsystem_report(cfg.subsystems);
    write_outputs(opt, cfg, {{"subsystems", cli::subsystems_table(rows)}});
    return kExitOk;
}

int run_verify() {
    const auto report = oracle::run_oracle_suite();
    oracle::print_verify_report(report, /*strict=*/false);
    if (!report.all_pass) {
        std::printf("verify: FAILED\n");
        return kExitNumeric;
    }
    std::printf("verify: all %zu checks passed\n", report.cells.size());
    return kExitOk;
}

struct PlotOptions {
    std::string csv_path;
    std::string out_path;
    cli::PlotSpec spec;
};

int run_plot(const PlotOptions& opt) {
    cli::render_plot(opt.csv_path, opt.spec, opt.out_path);
    std::printf("wrote %s\n", opt.out_path.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"grand-canonical lattice Bose gas: locality-of-temperature toolkit"};
    app.require_subcommand(1);

    CommonOptions locality_opt, profile_opt, phase_opt, corr_opt, subsys_opt;
    add_common(app.add_subcommand("locality", "fidelity vs boundary size sweep"), locality_opt);
    add_common(app.add_subcommand("profile", "fidelity vs temperature profile"), profile_opt);
    add_common(app.add_subcommand("phase", "chemical potential, condensate fraction, T_c"),
               phase_opt);
    add_common(app.add_subcommand("correlations", "density-density correlation scan"), corr_opt);
    add_common(app.add_subcommand("subsystems", "fidelity/entropy/purity per subsystem shape"),
               subsys_opt);
    app.add_subcommand("verify", "run the Fock-oracle equivalence suite");

    PlotOptions plot_opt;
    {
        CLI::App* plot = app.add_subcommand("plot", "render a CSV as a static SVG plot");
        plot->add_option("--csv", plot_opt.csv_path, "input CSV")->required();
        plot->add_option("--svg", plot_opt.out_path, "output SVG path")->required();
        plot->add_option("--x", plot_opt.spec.x_column, "x column (default: per CSV kind)");
        plot->add_option("--y", plot_opt.spec.y_column, "y column");
        plot->add_option("--series", plot_opt.spec.series_column, "series column");
        plot->add_option("--title", plot_opt.spec.title, "plot title");
        plot->add_flag("--logx", plot_opt.spec.log_x, "log-scale x axis");
        plot->add_flag("--logy", plot_opt.spec.log_y, "log-scale y axis");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (app.got_subcommand("locality")) return run_locality(locality_opt);
        if (app.got_subcommand("profile")) return run_profile(profile_opt);
        if (app.got_subcommand("phase")) return run_phase(phase_opt);
        if (app.got_subcommand("correlations")) return run_correlations(corr_opt);
        if (app.got_subcommand("subsystems")) return run_subsystems(subsys_opt);
        if (app.got_subcommand("verify")) return run_verify();
        if (app.got_subcommand("plot")) return run_plot(plot_opt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitConfig;
}
