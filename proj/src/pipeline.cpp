#include "eecm/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "eecm/csv.hpp"
#include "eecm/errors.hpp"
#include "eecm/health.hpp"
#include "eecm/pack_io.hpp"
#include "eecm/svg.hpp"

namespace eecm {

using nlohmann::json;

namespace {

json parse_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string("cannot open ") + what + ": " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string(what) + " is not valid JSON: " + e.what());
    }
}

ProfileSegment segment_from_json(const json& j, double q_nominal_ah) {
    ProfileSegment s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "cc" || kind == "constant_current") {
        s.kind = SegmentKind::constant_current;
    } else if (kind == "drive" || kind == "drive_cycle") {
        s.kind = SegmentKind::drive_cycle;
    } else if (kind == "hppc") {
        s.kind = SegmentKind::hppc;
    } else {
        throw ConfigError("unknown segment kind: " + kind);
    }
    if (j.contains("amps"))
        s.magnitude_a = j.at("amps").get<double>();
    else if (j.contains("c_rate"))
        s.magnitude_a = j.at("c_rate").get<double>() * q_nominal_ah;
    else if (j.contains("rms_a"))
        s.magnitude_a = j.at("rms_a").get<double>();
    else if (j.contains("rms_c"))
        s.magnitude_a = j.at("rms_c").get<double>() * q_nominal_ah;
    else if (s.kind != SegmentKind::constant_current)
        throw ConfigError("segment needs a magnitude (amps/c_rate/rms_a/rms_c)");
    s.duration_s = j.at("duration_s").get<double>();
    if (j.contains("termination_v")) s.termination_v = j.at("termination_v").get<double>();
    s.regen_fraction = j.value("regen_fraction", 0.3);
    s.correlation_time_s = j.value("correlation_time_s", 30.0);
    s.pulse_s = j.value("pulse_s", 30.0);
    s.rest_s = j.value("rest_s", 600.0);
    return s;
}

} // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
    const json j = parse_json_file(path, "run config");
    RunConfig c;
    c.pack_path = j.value("pack", "");
    c.scenario_path = j.value("scenario", "");
    c.input_csv = j.value("input_csv", "");
    c.truth_csv = j.value("truth_csv", "");
    c.output_dir = j.value("output_dir", "out");
    c.seed = j.value("seed", 1ULL);
    c.plots = j.value("plots", false);
    if (j.contains("estimator")) {
        const auto& e = j.at("estimator");
        c.estimator.h = e.value("h", c.estimator.h);
        if (e.contains("process_cov_diag")) {
            const auto v = e.at("process_cov_diag").get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("process_cov_diag needs 3 entries");
            c.estimator.process_cov_diag = Eigen::Vector3d(v[0], v[1], v[2]);
        }
        c.estimator.meas_var_v2 = e.value("meas_var_v2", c.estimator.meas_var_v2);
        c.estimator.init_soc = e.value("init_soc", c.estimator.init_soc);
        if (e.contains("init_var_diag")) {
            const auto v = e.at("init_var_diag").get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("init_var_diag needs 3 entries");
            c.estimator.init_var_diag = Eigen::Vector3d(v[0], v[1], v[2]);
        }
        if (e.contains("init_qp_ah")) c.estimator.init_qp_ah = e.at("init_qp_ah").get<double>();
        if (e.contains("init_qn_ah")) c.estimator.init_qn_ah = e.at("init_qn_ah").get<double>();
    }
    if (j.contains("awtls")) {
        const auto& a = j.at("awtls");
        c.awtls.gamma = a.value("gamma", c.awtls.gamma);
        c.awtls.dtheta_floor = a.value("dtheta_floor", c.awtls.dtheta_floor);
        c.awtls.window_s = a.value("window_s", c.awtls.window_s);
        c.awtls.current_noise_a = a.value("current_noise_a", c.awtls.current_noise_a);
        c.awtls.burn_in_s = a.value("burn_in_s", c.awtls.burn_in_s);
        c.awtls.innovation_gate = a.value("innovation_gate", c.awtls.innovation_gate);
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        c.solver.period_s = s.value("period_s", c.solver.period_s);
        if (s.contains("vmin_v")) c.solver.vmin_v = s.at("vmin_v").get<double>();
        if (s.contains("vmax_v")) c.solver.vmax_v = s.at("vmax_v").get<double>();
    }
    if (j.contains("fit")) {
        const auto& f = j.at("fit");
        c.fit_input_csv = f.value("input_csv", "");
        c.fit_electrode = f.value("electrode", "positive");
        c.fit_output_pack = f.value("output_pack", "");
        if (f.contains("breakpoints"))
            c.fit.breakpoints = f.at("breakpoints").get<std::vector<double>>();
        c.fit.w1 = f.value("w1", c.fit.w1);
        c.fit.w2 = f.value("w2", c.fit.w2);
        c.fit.de.population = f.value("population", c.fit.de.population);
        c.fit.de.generations = f.value("generations", c.fit.de.generations);
        c.fit.de.seed = f.value("seed", c.fit.de.seed);
    }
    if (j.contains("report")) {
        c.report_estimates_csv = j.at("report").value("estimates_csv", "");
    }
    return c;
}

void RunConfig::validate_for_estimate() const {
    if (pack_path.empty()) throw ConfigError("run config needs a parameter pack path");
    const bool has_scenario = !scenario_path.empty();
    const bool has_input = !input_csv.empty();
    if (has_scenario == has_input)
        throw ConfigError("exactly one of scenario/input_csv must be set");
}

Scenario Scenario::from_json_file(const std::string& path, const EsohParams& nominal) {
    const json j = parse_json_file(path, "scenario");
    Scenario s;
    if (j.contains("degradation")) {
        const auto& d = j.at("degradation");
        s.degradation.lam_p_pct = d.value("lam_p_pct", 0.0);
        s.degradation.lam_n_pct = d.value("lam_n_pct", 0.0);
        s.degradation.lli_pct = d.value("lli_pct", 0.0);
    }
    if (j.contains("mismatch")) {
        s.mismatch_fraction = j.at("mismatch").value("fraction", 0.0);
        s.mismatch_seed = j.at("mismatch").value("seed", 0ULL);
    }
    s.initial_soc = j.value("initial_soc", 1.0);
    const auto& p = j.at("profile");
    s.profile.dt_s = p.value("dt_s", 1.0);
    s.profile.noise_std_v = p.value("noise_std_v", 0.0);
    s.profile.seed = p.value("seed", 0ULL);
    const double q_nominal = nominal.useful_capacity_ah();
    const int repeat = p.value("repeat", 1);
    const auto& segs = p.at("segments");
    for (int r = 0; r < repeat; ++r)
        for (const auto& js : segs) s.profile.segments.push_back(segment_from_json(js, q_nominal));
    return s;
}

std::string effective_output_dir(const RunConfig& config) {
    if (const char* env = std::getenv("EECM_OUTPUT_DIR"); env && *env) return env;
    return config.output_dir;
}

SimulateOutputs cmd_simulate(const RunConfig& config) {
    config.validate_for_estimate();
    if (config.scenario_path.empty()) throw ConfigError("simulate needs a scenario");
    const ParameterPack pack = load_pack(config.pack_path);
    const Scenario scenario = Scenario::from_json_file(config.scenario_path, pack.esoh);

    const EsohParams truth_esoh = apply_degradation(pack.esoh, scenario.degradation,
                                                    pack.vmin_v, pack.vmax_v, pack.ocp_neg,
                                                    pack.ocp_pos);
    const ParameterPack truth_pack =
        scenario.mismatch_fraction > 0.0
            ? apply_table_mismatch(pack, scenario.mismatch_fraction, scenario.mismatch_seed)
            : pack;

    const SimulationResult sim =
        simulate_trajectory(truth_pack, truth_esoh, scenario.profile, scenario.initial_soc);

    const std::string dir = effective_output_dir(config);
    std::filesystem::create_directories(dir);
    SimulateOutputs out;
    out.measurements_csv = dir + "/measurements.csv";
    out.truth_csv = dir + "/truth.csv";
    CsvWriter meas(out.measurements_csv, {"t_s", "current_a", "voltage_v"});
    CsvWriter truth(out.truth_csv, {"t_s", "thn", "thp", "soc"});
    for (std::size_t i = 0; i < sim.records.size(); ++i) {
        const auto& r = sim.records[i];
        meas.row({r.t_s, r.current_a, r.voltage_v});
        const auto& t = sim.truth[i];
        truth.row({t.t_s, t.thn, t.thp, t.soc});
    }
    out.samples = static_cast<long>(sim.records.size());
    return out;
}

EstimationPipeline::EstimationPipeline(const ParameterPack& pack, const RunConfig& config)
    : pack_(pack),
      config_(config),
      estimator_(
          pack,
          [&] {
              EsohParams init = pack.esoh;
              if (config.estimator.init_qp_ah) init.qp_ah = *config.estimator.init_qp_ah;
              if (config.estimator.init_qn_ah) init.qn_ah = *config.estimator.init_qn_ah;
              return init;
          }(),
          [&] {
              NoiseConfig n;
              n.process_cov = config.estimator.process_cov_diag.asDiagonal();
              n.meas_var_v2 = config.estimator.meas_var_v2;
              n.h = config.estimator.h;
              return n;
          }(),
          std::clamp(config.estimator.init_soc, 0.0, 1.0), config.estimator.init_var_diag),
      harvester_(config.awtls.window_s, config.awtls.current_noise_a, pack.esoh.eta),
      acc_pos_{Electrode::positive, config.awtls.gamma, config.awtls.dtheta_floor},
      acc_neg_{Electrode::negative, config.awtls.gamma, config.awtls.dtheta_floor},
      schedule_(config.solver.period_s),
      vmin_v_(config.solver.vmin_v.value_or(pack.vmin_v)),
      vmax_v_(config.solver.vmax_v.value_or(pack.vmax_v)),
      warm_start_{pack.esoh.thp0, pack.esoh.thp100, pack.esoh.thn0, pack.esoh.thn100} {}

EstimationPipeline::SampleResult EstimationPipeline::on_record(const CyclingRecord& record) {
    SampleResult out;
    out.step = estimator_.step(record);

    const double dt = have_prev_t_ ? record.t_s - prev_t_s_ : 0.0;
    prev_t_s_ = record.t_s;
    have_prev_t_ = true;

    const double vres = record.voltage_v - out.step.vhat_v;
    window_innovation_sq_ += vres * vres;
    ++window_samples_;

    last_pairs_ = harvester_.on_sample(record.t_s, record.current_a, dt, out.step.thp,
                                       out.step.pos.cov(2, 2), out.step.thn,
                                       out.step.neg.cov(2, 2));
    bool window_ok = true;
    if (!last_pairs_.empty()) {
        const double inn_rms =
            std::sqrt(window_innovation_sq_ / std::max<long>(1, window_samples_));
        if (record.t_s < config_.awtls.burn_in_s) window_ok = false;
        if (config_.awtls.innovation_gate > 0.0 &&
            inn_rms > config_.awtls.innovation_gate *
                          std::sqrt(config_.estimator.meas_var_v2))
            window_ok = false;
        window_innovation_sq_ = 0.0;
        window_samples_ = 0;
    }
    for (auto& pair : last_pairs_) {
        auto& acc = pair.electrode == Electrode::positive ? acc_pos_ : acc_neg_;
        pair.accepted =
            window_ok && acc.push_pair(pair.dtheta, pair.dah, pair.var_x, pair.var_y);
        if (!pair.accepted) continue;
        const auto est = acc.estimate();
        if (!est || est->q_ah < 0.1 || est->q_ah > 100.0) continue; // keep previous
        const double qp = estimator_.esoh().qp_ah;
        const double qn = estimator_.esoh().qn_ah;
        if (pair.electrode == Electrode::positive) {
            estimator_.set_capacities(est->q_ah, qn);
            sigma_qp_ = est->sigma_q_ah;
        } else {
            estimator_.set_capacities(qp, est->q_ah);
            sigma_qn_ = est->sigma_q_ah;
        }
    }

    if (schedule_.due(record.t_s)) {
        out.solver_fired = true;
        const EsohParams& cur = estimator_.esoh();
        WindowSolveInput in;
        in.qp_ah = cur.qp_ah;
        in.qn_ah = cur.qn_ah;
        in.thp = out.step.thp;
        in.thn = out.step.thn;
        in.vmin_v = vmin_v_;
        in.vmax_v = vmax_v_;
        in.warm_start = warm_start_;
        last_solution_ = solve_windows(in, pack_.ocp_neg, pack_.ocp_pos);
        if (last_solution_.ok) {
            estimator_.set_windows(last_solution_.thp0, last_solution_.thp100,
                                   last_solution_.thn0, last_solution_.thn100);
            warm_start_ = {last_solution_.thp0, last_solution_.thp100, last_solution_.thn0,
                           last_solution_.thn100};
            ++solver_accepted_;
            out.solver_accepted = true;
        } else {
            ++solver_rejected_;
        }
    }
    return out;
}

EstimateOutputs cmd_estimate(const RunConfig& config) {
    config.validate_for_estimate();
    const ParameterPack pack = load_pack(config.pack_path);

    std::string input = config.input_csv;
    if (input.empty()) input = cmd_simulate(config).measurements_csv;

    const std::string dir = effective_output_dir(config);
    std::filesystem::create_directories(dir);
    EstimateOutputs out;
    out.estimates_csv = dir + "/estimates.csv";
    out.endpoints_csv = dir + "/endpoints.csv";
    out.health_csv = dir + "/health.csv";
    out.pairs_csv = dir + "/pairs.csv";

    CsvWriter estimates(out.estimates_csv,
                        {"t_s", "soc", "thp", "thn", "vhat_v", "qp_ah", "qn_ah"});
    CsvWriter endpoints(out.endpoints_csv, {"t_s", "thp0", "thp100", "thn0", "thn100", "flag"});
    CsvWriter health(out.health_csv,
                     {"t_s", "lam_p_pct", "lam_n_pct", "lli_pct", "q_cell_ah", "soh"});
    CsvWriter pairs(out.pairs_csv, {"t_s", "electrode_pos", "dtheta", "dah", "var_x", "var_y",
                                    "accepted", "qhat_ah"});

    EstimationPipeline pipeline(pack, config);
    CsvReader reader(input);
    const int ct = reader.column("t_s");
    const int ci = reader.column("current_a");
    const int cv = reader.column("voltage_v");
    if (ct < 0 || ci < 0 || cv < 0)
        throw DataError("input csv must have t_s,current_a,voltage_v columns");

    std::vector<double> cells;
    std::vector<double> plot_t, plot_soc, plot_qp, plot_qn;
    while (reader.next(cells)) {
        CyclingRecord rec{cells[ct], cells[ci], cells[cv]};
        if (std::isnan(rec.voltage_v)) {
            std::cerr << "warning: skipping row " << reader.row_number()
                      << " (NaN voltage)\n";
            ++out.skipped_rows;
            continue;
        }
        const auto res = pipeline.on_record(rec);
        const EsohParams& esoh = pipeline.esoh();
        estimates.row({rec.t_s, res.step.soc, res.step.thp, res.step.thn, res.step.vhat_v,
                       esoh.qp_ah, esoh.qn_ah});
        for (const auto& pair : pipeline.last_pairs()) {
            pairs.row({pair.t_s, pair.electrode == Electrode::positive ? 1.0 : 0.0,
                       pair.dtheta, pair.dah, pair.var_x, pair.var_y,
                       pair.accepted ? 1.0 : 0.0,
                       pair.electrode == Electrode::positive ? esoh.qp_ah : esoh.qn_ah});
        }
        if (res.solver_fired) {
            endpoints.row({rec.t_s, esoh.thp0, esoh.thp100, esoh.thn0, esoh.thn100,
                           res.solver_accepted ? 0.0 : 1.0});
            const HealthReport hr = make_report(esoh, pack.esoh, rec.t_s);
            health.row({hr.t_s, hr.lam_p_pct, hr.lam_n_pct, hr.lli_pct, hr.q_cell_ah, hr.soh});
        }
        if (config.plots && (out.samples % 10 == 0)) {
            plot_t.push_back(rec.t_s / 3600.0);
            plot_soc.push_back(res.step.soc);
            plot_qp.push_back(esoh.qp_ah);
            plot_qn.push_back(esoh.qn_ah);
        }
        ++out.samples;
        out.final_soc = res.step.soc;
    }
    out.solver_accepted = pipeline.solver_accepted();
    out.solver_rejected = pipeline.solver_rejected();
    out.final_esoh = pipeline.esoh();

    if (config.plots) {
        write_svg_chart(dir + "/soc.svg", "SOC estimate",
                        {{"soc", "#1f77b4", plot_t, plot_soc}});
        write_svg_chart(dir + "/capacity.svg", "Electrode capacity estimates (Ah)",
                        {{"qp_ah", "#d62728", plot_t, plot_qp},
                         {"qn_ah", "#2ca02c", plot_t, plot_qn}});
    }
    return out;
}

FitOutputs cmd_fit(const RunConfig& config) {
    if (config.pack_path.empty()) throw ConfigError("fit needs a parameter pack");
    if (config.fit_input_csv.empty()) throw ConfigError("fit needs an input hppc csv");
    ParameterPack pack = load_pack(config.pack_path);

    Electrode electrode;
    if (config.fit_electrode == "positive")
        electrode = Electrode::positive;
    else if (config.fit_electrode == "negative")
        electrode = Electrode::negative;
    else
        throw ConfigError("fit electrode must be 'positive' or 'negative'");

    CsvReader reader(config.fit_input_csv);
    const int ct = reader.column("t_s");
    const int ci = reader.column("current_a");
    const int cv = reader.column("potential_v");
    const int cs = reader.column("sol");
    if (ct < 0 || ci < 0 || cv < 0) throw DataError("hppc csv needs t_s,current_a,potential_v");
    if (cs < 0) throw DataError("hppc csv is missing the sol column");

    HppcDataset data;
    data.electrode = electrode;
    std::vector<double> cells;
    while (reader.next(cells)) {
        data.t_s.push_back(cells[ct]);
        data.current_a.push_back(cells[ci]);
        data.potential_v.push_back(cells[cv]);
        data.sol.push_back(cells[cs]);
    }

    const OcpCurve& curve = electrode == Electrode::positive ? pack.ocp_pos : pack.ocp_neg;
    FitOutputs out;
    out.result = fit_half_cell(data, curve, config.fit);

    // Merge fitted breakpoints into the base table so partial fits still
    // produce a valid full-span pack.
    HalfCellParamTable& table =
        electrode == Electrode::positive ? pack.table_pos : pack.table_neg;
    for (const auto& b : out.result.breakpoints) {
        bool merged = false;
        for (std::size_t i = 0; i < table.sol.size(); ++i) {
            if (std::abs(table.sol[i] - b.sol) < 1e-9) {
                table.r0_ohm[i] = b.rc.r0;
                table.r1_ohm[i] = b.rc.r1;
                table.c1_f[i] = b.rc.c1;
                table.r2_ohm[i] = b.rc.r2;
                table.c2_f[i] = b.rc.c2;
                merged = true;
                break;
            }
        }
        if (!merged) throw DataError("fitted breakpoint not on the pack's SOL grid");
    }
    const std::string dir = effective_output_dir(config);
    std::filesystem::create_directories(dir);
    out.pack_json = config.fit_output_pack.empty() ? dir + "/fitted_pack.json"
                                                   : config.fit_output_pack;
    save_pack(pack, out.pack_json);
    return out;
}

ReportOutputs cmd_report(const RunConfig& config) {
    if (config.pack_path.empty()) throw ConfigError("report needs a parameter pack");
    if (config.report_estimates_csv.empty()) throw ConfigError("report needs an estimates csv");
    const ParameterPack pack = load_pack(config.pack_path);

    // Window endpoints live in the sibling endpoints.csv written by estimate.
    const std::filesystem::path est_path(config.report_estimates_csv);
    const std::string endpoints_path = (est_path.parent_path() / "endpoints.csv").string();

    struct Tick {
        double t_s;
        std::array<double, 4> w;
    };
    std::vector<Tick> ticks;
    {
        CsvReader endpoints(endpoints_path);
        std::vector<double> cells;
        const int ct = endpoints.column("t_s");
        const int c0 = endpoints.column("thp0");
        const int c1 = endpoints.column("thp100");
        const int c2 = endpoints.column("thn0");
        const int c3 = endpoints.column("thn100");
        if (ct < 0 || c0 < 0 || c1 < 0 || c2 < 0 || c3 < 0)
            throw DataError("endpoints csv missing columns");
        while (endpoints.next(cells))
            ticks.push_back({cells[ct], {cells[c0], cells[c1], cells[c2], cells[c3]}});
    }

    const std::string dir = effective_output_dir(config);
    std::filesystem::create_directories(dir);
    ReportOutputs out;
    out.health_csv = dir + "/health_report.csv";
    CsvWriter health(out.health_csv,
                     {"t_s", "lam_p_pct", "lam_n_pct", "lli_pct", "q_cell_ah", "soh"});

    CsvReader estimates(config.report_estimates_csv);
    const int ct = estimates.column("t_s");
    const int cqp = estimates.column("qp_ah");
    const int cqn = estimates.column("qn_ah");
    if (ct < 0 || cqp < 0 || cqn < 0)
        throw DataError("estimates csv missing t_s/qp_ah/qn_ah columns");

    std::vector<double> cells;
    std::size_t tick_idx = 0;
    std::optional<HealthReport> last;
    while (tick_idx < ticks.size() && estimates.next(cells)) {
        while (tick_idx < ticks.size() && ticks[tick_idx].t_s <= cells[ct] + 1e-9) {
            EsohParams esoh = pack.esoh;
            esoh.qp_ah = cells[cqp];
            esoh.qn_ah = cells[cqn];
            esoh.thp0 = ticks[tick_idx].w[0];
            esoh.thp100 = ticks[tick_idx].w[1];
            esoh.thn0 = ticks[tick_idx].w[2];
            esoh.thn100 = ticks[tick_idx].w[3];
            const HealthReport hr = make_report(esoh, pack.esoh, cells[ct]);
            health.row({hr.t_s, hr.lam_p_pct, hr.lam_n_pct, hr.lli_pct, hr.q_cell_ah, hr.soh});
            last = hr;
            ++tick_idx;
        }
    }

    std::ostringstream ss;
    if (last) {
        ss << "final health: lam_p=" << last->lam_p_pct << "% lam_n=" << last->lam_n_pct
           << "% lli=" << last->lli_pct << "% q_cell=" << last->q_cell_ah
           << "Ah soh=" << last->soh;
        if (last->negative_mode_flag) ss << " [negative-mode flag]";
    } else {
        ss << "no solver ticks in input; empty report";
    }
    out.summary_text = ss.str();
    out.final_report = last;
    return out;
}

} // namespace eecm
