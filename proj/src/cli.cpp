#include "tripod/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tripod/config.hpp"
#include "tripod/readout.hpp"
#include "tripod/csv.hpp"
#include "tripod/experiments.hpp"

namespace tripod {

namespace {

namespace fs = std::filesystem;

struct CommandContext {
    RunConfig config;
    ScenarioParams params;
    fs::path out_dir;

    std::vector<std::string> header(const std::string& scenario) const {
        std::vector<std::string> lines;
        lines.push_back("tripodsim scenario: " + scenario);
        lines.push_back("resolved configuration:");
        std::istringstream in(config.resolved_text());
        std::string line;
        while (std::getline(in, line)) lines.push_back("  " + line);
        return lines;
    }

    void emit(const std::string& name, csv::Table table, const std::string& title,
              const std::string& xlabel, const std::string& ylabel,
              const std::vector<csv::PlotSeries>& series) const {
        const fs::path csv_path = out_dir / (name + ".csv");
        csv::write(csv_path.string(), table);
        std::cout << "wrote " << csv_path.string() << " (" << table.rows.size() << " rows)\n";
        if (!series.empty()) {
            const fs::path gp_path = out_dir / (name + ".gp");
            csv::write_file(gp_path.string(),
                            csv::plot_script(name + ".csv", title, xlabel, ylabel, series));
            std::cout << "wrote " << gp_path.string() << "\n";
        }
    }
};

std::string fmt(double v) { return csv::format_double(v); }

csv::Table record_table(const CommandContext& ctx, const std::string& scenario,
                        const std::vector<ReadoutRecord>& records) {
    csv::Table table;
    table.comments = ctx.header(scenario);
    table.columns = {"record", "time_us", "intensity_rel", "energy_rel",
                     "remaining_norm", "delta_pi"};
    for (const auto& r : records)
        table.add_row({r.label, fmt(r.time * 1e6), fmt(r.intensity), fmt(r.energy),
                       fmt(r.remaining_norm), fmt(r.total_phase / pi)});
    return table;
}

void emit_records(const CommandContext& ctx, const std::string& name,
                  const ScenarioResult& result, Engine engine) {
    if (engine != Engine::numeric)
        ctx.emit(name, record_table(ctx, name, result.analytic), name, "record", "intensity",
                 {});
    if (engine != Engine::analytic)
        ctx.emit(name + "_numeric", record_table(ctx, name + " (numeric)", result.numeric),
                 name, "record", "intensity", {});
    if (engine == Engine::both)
        std::cout << name << ": max analytic/numeric discrepancy = "
                  << result.max_discrepancy << "\n";
}

int points_or(const CommandContext& ctx, int fallback) {
    return ctx.config.points > 0 ? ctx.config.points : fallback;
}

void run_fig2_command(const CommandContext& ctx) {
    emit_records(ctx, "fig2", run_fig2(ctx.params, ctx.config.engine), ctx.config.engine);
}

void run_fig3_command(const CommandContext& ctx) {
    emit_records(ctx, "fig3", run_fig3(ctx.params, ctx.config.engine), ctx.config.engine);
}

csv::Table fig4_table(const CommandContext& ctx, const std::string& scenario,
                      const std::vector<Fig4Row>& rows) {
    csv::Table table;
    table.comments = ctx.header(scenario);
    table.columns = {"delta_r_pi",        "first_read_intensity", "second_read_intensity",
                     "first_read_energy", "second_read_energy",   "corrected_sum_energy"};
    for (const auto& r : rows)
        table.add_row({fmt(r.delta_r / pi), fmt(r.first_intensity), fmt(r.second_intensity),
                       fmt(r.first_energy), fmt(r.second_energy), fmt(r.corrected_sum)});
    return table;
}

void run_fig4_command(const CommandContext& ctx) {
    const int n = points_or(ctx, 24);
    // Sweep starts at the compensated phase so a degenerate sweep of one
    // point reads out at the constructive maximum.
    const double comp =
        compensation_phase(ctx.params.tau1, ctx.params.env.larmor(), ctx.params.delta_w);
    std::vector<double> grid = uniform_grid(0.0, two_pi, n);
    for (double& d : grid) d = wrap_angle(comp + d);
    const Fig4Result result = run_fig4(ctx.params, ctx.config.engine, grid);
    const std::vector<csv::PlotSeries> series = {{2, "first read"}, {3, "second read"}};
    if (ctx.config.engine != Engine::numeric)
        ctx.emit("fig4", fig4_table(ctx, "fig4", result.analytic), "readout vs read phase",
                 "delta_r (pi)", "intensity (single-channel units)", series);
    if (ctx.config.engine != Engine::analytic)
        ctx.emit("fig4_numeric", fig4_table(ctx, "fig4 (numeric)", result.numeric),
                 "readout vs read phase", "delta_r (pi)", "intensity (single-channel units)",
                 series);
    if (ctx.config.engine == Engine::both)
        std::cout << "fig4: max analytic/numeric discrepancy = " << result.max_discrepancy
                  << "\n";
}

csv::Table fig5_table(const CommandContext& ctx, const std::string& scenario,
                      const std::vector<Fig5Row>& rows) {
    csv::Table table;
    table.comments = ctx.header(scenario);
    table.columns = {"t_us", "efficiency_uncomp", "efficiency_comp"};
    for (const auto& r : rows)
        table.add_row({fmt(r.t * 1e6), fmt(r.uncompensated), fmt(r.compensated)});
    return table;
}

void run_fig5_command(const CommandContext& ctx) {
    const int n = points_or(ctx, 101);
    const std::vector<double> times = uniform_grid(ctx.config.fig5_tmin_us * 1e-6,
                                                   ctx.config.fig5_tmax_us * 1e-6, n, true);
    const Fig5Result result = run_fig5(ctx.params, ctx.config.engine, times);
    const std::vector<csv::PlotSeries> series = {{2, "fixed read phase"},
                                                 {3, "compensated read phase"}};
    if (ctx.config.engine != Engine::numeric)
        ctx.emit("fig5", fig5_table(ctx, "fig5", result.analytic),
                 "retrieval efficiency vs storage time", "t (us)", "efficiency", series);
    if (ctx.config.engine != Engine::analytic)
        ctx.emit("fig5_numeric", fig5_table(ctx, "fig5 (numeric)", result.numeric),
                 "retrieval efficiency vs storage time", "t (us)", "efficiency", series);
    if (ctx.config.engine == Engine::both)
        std::cout << "fig5: max analytic/numeric discrepancy = " << result.max_discrepancy
                  << "\n";
}

void run_isolation_command(const CommandContext& ctx) {
    emit_records(ctx, "isolation", run_isolation(ctx.params, ctx.config.engine),
                 ctx.config.engine);
}

csv::Table fringe_table(const CommandContext& ctx, const std::string& scenario,
                        const std::vector<FringeRow>& rows, const FringeFit& fit) {
    csv::Table table;
    table.comments = ctx.header(scenario);
    table.comments.push_back("fit: period_pi = " + fmt(fit.period / pi) +
                             ", visibility = " + fmt(fit.visibility));
    table.columns = {"delta_r_pi", "energy_rel", "relative"};
    for (const auto& r : rows)
        table.add_row({fmt(r.delta_r / pi), fmt(r.energy), fmt(r.relative)});
    return table;
}

void run_fringe_command(const CommandContext& ctx) {
    const int n = points_or(ctx, 16);
    const std::vector<double> grid = uniform_grid(0.0, two_pi, n);
    const FringeResult result = run_fringe(ctx.params, ctx.config.engine, grid);
    const std::vector<csv::PlotSeries> series = {{3, "normalized readout"}};
    if (ctx.config.engine != Engine::numeric) {
        ctx.emit("fringe", fringe_table(ctx, "fringe", result.analytic, result.analytic_fit),
                 "readout interference fringe", "delta_r (pi)", "relative readout", series);
        std::cout << "fringe: analytic period = " << result.analytic_fit.period / pi
                  << " pi, visibility = " << result.analytic_fit.visibility << "\n";
    }
    if (ctx.config.engine != Engine::analytic) {
        ctx.emit("fringe_numeric",
                 fringe_table(ctx, "fringe (numeric)", result.numeric, result.numeric_fit),
                 "readout interference fringe", "delta_r (pi)", "relative readout", series);
        std::cout << "fringe: numeric period = " << result.numeric_fit.period / pi
                  << " pi, visibility = " << result.numeric_fit.visibility << "\n";
    }
}

void run_oracle_command(const CommandContext& ctx) {
    const OracleResult result =
        run_oracle_check(ctx.params, ctx.config.cases, ctx.config.seed);
    csv::Table table;
    table.comments = ctx.header("oracle-check");
    table.columns = {"case",         "delta_w_pi", "delta_r_pi", "tau_us",
                     "analytic_rel", "numeric_rel", "discrepancy"};
    for (const auto& r : result.rows)
        table.add_row({std::to_string(r.index), fmt(r.delta_w / pi), fmt(r.delta_r / pi),
                       fmt(r.tau * 1e6), fmt(r.analytic_relative), fmt(r.numeric_relative),
                       fmt(r.discrepancy)});
    ctx.emit("oracle_check", table, "closed form vs time domain", "case", "relative readout",
             {});
    std::cout << "oracle-check: " << result.rows.size()
              << " cases, max discrepancy = " << result.max_discrepancy << "\n";
    if (result.max_discrepancy > 0.02)
        throw std::runtime_error("oracle-check: discrepancy exceeds 2%");
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"two-channel tripod optical memory simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string engine_flag;
    std::string out_flag;
    int points_flag = -1;
    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--engine", engine_flag, "engine: analytic, numeric or both");
    app.add_option("--out", out_flag, "output directory");
    app.add_option("--points", points_flag, "number of sweep points/rows")
        ->check(CLI::NonNegativeNumber);

    struct Command {
        const char* name;
        const char* help;
        void (*run)(const CommandContext&);
        CLI::App* sub = nullptr;
    };
    Command commands[] = {
        {"fig2", "single-channel reference and two-beam constructive readout", run_fig2_command},
        {"fig3", "destructive readout and delayed recovery", run_fig3_command},
        {"fig4", "readout versus read phase, with matched second read", run_fig4_command},
        {"fig5", "collapse-and-revival and Larmor compensation", run_fig5_command},
        {"isolation", "cross-channel isolation check", run_isolation_command},
        {"fringe", "read-phase interference fringe with cos^2 fit", run_fringe_command},
        {"oracle-check", "randomized closed-form/time-domain equivalence suite",
         run_oracle_command},
    };
    for (auto& cmd : commands) {
        cmd.sub = app.add_subcommand(cmd.name, cmd.help);
        cmd.sub->fallthrough();  // global flags may follow the subcommand
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        CommandContext ctx;
        ctx.config = config_path.empty() ? RunConfig{} : load_config_file(config_path);
        if (!engine_flag.empty()) ctx.config.engine = parse_engine(engine_flag);
        if (points_flag >= 0) ctx.config.points = points_flag;
        if (!out_flag.empty()) ctx.config.out_dir = out_flag;
        if (ctx.config.out_dir.empty()) {
            if (const char* env_dir = std::getenv("TRIPODSIM_OUT"))
                ctx.config.out_dir = env_dir;
            else
                ctx.config.out_dir = ".";
        }
        ctx.out_dir = ctx.config.out_dir;
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);
        if (ec || !fs::is_directory(ctx.out_dir)) {
            std::cerr << "error: cannot create output directory '" << ctx.out_dir.string()
                      << "'\n";
            return 1;
        }
        ctx.params = ctx.config.to_scenario();

        for (const auto& cmd : commands) {
            if (cmd.sub->parsed()) {
                cmd.run(ctx);
                return 0;
            }
        }
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace tripod
