#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eecm/errors.hpp"
#include "eecm/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string pack;
    std::string scenario;
    std::string input;
    std::string output_dir;
    std::string truth;
    long long seed = -1;
    bool plots = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("-c,--config", f.config_path, "run config JSON");
    cmd->add_option("--pack", f.pack, "parameter pack JSON (overrides config)");
    cmd->add_option("--scenario", f.scenario, "scenario JSON (overrides config)");
    cmd->add_option("--input", f.input, "input measurements CSV (overrides config)");
    cmd->add_option("--output-dir", f.output_dir, "output directory (overrides config)");
    cmd->add_option("--seed", f.seed, "seed (overrides config)");
    cmd->add_flag("--plots", f.plots, "emit SVG plots");
}

eecm::RunConfig resolve(const CommonFlags& f) {
    eecm::RunConfig cfg;
    if (!f.config_path.empty()) cfg = eecm::RunConfig::from_json_file(f.config_path);
    // Flags win over the config file.
    if (!f.pack.empty()) cfg.pack_path = f.pack;
    if (!f.scenario.empty()) {
        cfg.scenario_path = f.scenario;
        cfg.input_csv.clear();
    }
    if (!f.input.empty()) {
        cfg.input_csv = f.input;
        cfg.scenario_path.clear();
    }
    if (!f.output_dir.empty()) cfg.output_dir = f.output_dir;
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    if (f.plots) cfg.plots = true;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"electrode-level battery state and health estimation toolkit"};
    app.require_subcommand(1);

    CommonFlags sim_flags, est_flags, fit_flags, rep_flags;
    std::string fit_electrode, fit_input, fit_out_pack, report_estimates;

    CLI::App* sim = app.add_subcommand("simulate", "synthesize truth + measurement CSVs");
    add_common(sim, sim_flags);
    CLI::App* est = app.add_subcommand("estimate", "run the estimation pipeline");
    add_common(est, est_flags);
    CLI::App* fit = app.add_subcommand("fit", "fit half-cell tables from HPPC data");
    add_common(fit, fit_flags);
    fit->add_option("--electrode", fit_electrode, "positive|negative");
    fit->add_option("--hppc", fit_input, "HPPC CSV (t_s,current_a,potential_v,sol)");
    fit->add_option("--out-pack", fit_out_pack, "fitted parameter pack path");
    CLI::App* rep = app.add_subcommand("report", "health report from an estimates CSV");
    add_common(rep, rep_flags);
    rep->add_option("--estimates", report_estimates, "estimates CSV from a previous run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const auto out = eecm::cmd_simulate(resolve(sim_flags));
            std::cout << "wrote " << out.measurements_csv << " and " << out.truth_csv << " ("
                      << out.samples << " samples)\n";
        } else if (est->parsed()) {
            const auto out = eecm::cmd_estimate(resolve(est_flags));
            std::cout << "wrote " << out.estimates_csv << " (" << out.samples << " samples, "
                      << out.skipped_rows << " skipped)\n"
                      << "window solves: " << out.solver_accepted << " accepted, "
                      << out.solver_rejected << " kept-last\n"
                      << "final: qp=" << out.final_esoh.qp_ah << "Ah qn=" << out.final_esoh.qn_ah
                      << "Ah soc=" << out.final_soc << "\n";
        } else if (fit->parsed()) {
            eecm::RunConfig cfg = resolve(fit_flags);
            if (!fit_electrode.empty()) cfg.fit_electrode = fit_electrode;
            if (!fit_input.empty()) cfg.fit_input_csv = fit_input;
            if (!fit_out_pack.empty()) cfg.fit_output_pack = fit_out_pack;
            const auto out = eecm::cmd_fit(cfg);
            std::cout << "wrote " << out.pack_json << " (J1=" << out.result.j1_v * 1e3
                      << " mV, J2=" << out.result.j2_v_per_s * 1e3 << " mV/s)\n";
        } else if (rep->parsed()) {
            eecm::RunConfig cfg = resolve(rep_flags);
            if (!report_estimates.empty()) cfg.report_estimates_csv = report_estimates;
            const auto out = eecm::cmd_report(cfg);
            std::cout << "wrote " << out.health_csv << "\n" << out.summary_text << "\n";
        }
    } catch (const eecm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const eecm::ArgumentError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const eecm::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
