#include "wgscatter/run.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "wgscatter/dynamics.hpp"
#include "wgscatter/errors.hpp"
#include "wgscatter/wavepackets.hpp"

#ifndef WGSCATTER_VERSION_STRING
#define WGSCATTER_VERSION_STRING "0.0.0"
#endif

namespace wgscatter {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string version_string() { return WGSCATTER_VERSION_STRING; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double read_record_coupling(const std::string& path, const ResolvedRun& r) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw FieldError("physics.coupling", "cannot read calibration record '" + path + "': " + e.what());
    }
    try {
        const auto& grid = j.at("grid");
        const bool same = grid.at("n_per_branch").get<std::size_t>() == r.grid.n_per_branch() &&
                          grid.at("kappa_max").get<double>() == r.grid.kappa_max() &&
                          j.at("gamma").get<double>() == r.params.gamma &&
                          j.at("group_velocity").get<double>() == r.params.group_velocity;
        if (!same)
            throw FieldError("physics.coupling",
                             "calibration record '" + path + "' was made for a different grid or gamma");
        return j.at("coupling").get<double>();
    } catch (const json::exception& e) {
        throw FieldError("physics.coupling", "malformed calibration record '" + path + "': " + e.what());
    }
}

json calibration_json(const CalibrationResult& c) {
    return {{"coupling", c.coupling},
            {"initial_guess", c.initial_guess},
            {"iterations", c.iterations},
            {"fit",
             {{"rate", c.fit.rate},
              {"amplitude", c.fit.amplitude},
              {"rate_error", c.fit.rate_error},
              {"rms_log_residual", c.fit.rms_log_residual},
              {"max_relative_deviation", c.fit.max_relative_deviation},
              {"samples", c.fit.samples}}}};
}

json grid_json(const Grid& g) {
    return {{"n_per_branch", g.n_per_branch()},
            {"kappa_max", g.kappa_max()},
            {"dk", g.dk()},
            {"modes", g.modes()},
            {"recurrence_length", g.recurrence_length()}};
}

json pulse_json(const PulseSpec& p) {
    return {{"sigma", p.sigma},
            {"z0", p.z0},
            {"delta", p.delta},
            {"direction", p.direction == Branch::RightGoing ? "right" : "left"}};
}

// Times for density rows: multiples of the interval, snapped to steps.
std::vector<std::size_t> density_steps(double interval, std::size_t steps, double dt_used) {
    std::vector<std::size_t> out;
    if (steps == 0) return {0};
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * interval;
        const auto s = static_cast<std::size_t>(std::llround(t / dt_used));
        if (s > steps) break;
        if (out.empty() || out.back() != s) out.push_back(s);
    }
    return out;
}

struct Execution {
    RunSummary summary;
    DensityMap density;
    std::vector<std::pair<std::string, std::string>> snapshot_files;
    std::vector<SeriesSample> series;
};

template <typename State, typename Traj>
void fill_common(Execution& x, const Traj& traj, double quanta) {
    auto& s = x.summary;
    s.dt_used = traj.dt_used;
    s.steps = traj.steps;
    x.series = traj.series;
    for (const auto& p : traj.series) {
        s.max_bookkeeping_error = std::max(s.max_bookkeeping_error, std::abs(p.N_R + p.N_L + p.P_e - quanta));
        s.max_norm_error = std::max(s.max_norm_error, std::abs(1.0 - p.norm));
    }
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%09.4f", t);
    return buf;
}

Execution execute(const RunConfig& cfg, bool with_files) {
    Execution x;
    auto& sum = x.summary;
    sum.resolved = resolve(cfg);
    sum.coupling = choose_coupling(cfg, sum.resolved);
    auto& r = sum.resolved;
    r.params.coupling = sum.coupling.g;

    const std::size_t steps = step_count(r.integrator);
    const double dt_used = steps ? r.integrator.t_end / static_cast<double>(steps) : 0.0;
    std::vector<std::size_t> dsteps;
    if (with_files && cfg.output.density) dsteps = density_steps(cfg.output.density_interval, steps, dt_used);
    x.density.z = r.zgrid.positions();
    auto next = dsteps.begin();

    auto record_density = [&](const auto& state, std::size_t step) {
        if (next == dsteps.end() || *next != step) return;
        ++next;
        const auto row = photon_density(state, r.grid, r.zgrid);
        x.density.times.push_back(state.time);
        x.density.values.insert(x.density.values.end(), row.begin(), row.end());
    };

    const Grid& grid = r.grid;
    const std::vector<double> z = r.zgrid.positions();
    if (r.kind == InputKind::TwoPhoton) {
        const auto s0 = build_two_photon_state(r.input, grid, r.params);
        const auto traj = evolve(s0, r.integrator, grid, r.params,
                                 [&](const TwoExcitationState& s, std::size_t k) { record_density(s, k); });
        fill_common<TwoExcitationState>(x, traj, 2.0);
        sum.report = make_scatter_report(traj, grid);
        if (with_files && cfg.output.snapshots) {
            const auto kap = mode_kappas(grid);
            for (const auto& c : traj.checkpoints) {
                const std::string tag = time_tag(c.time);
                const std::string head = header_block("two-photon amplitude at t = " + format_double(c.time), grid,
                                                      r.params);
                const Eigen::MatrixXd zmag = real_space_wavepacket(c, grid, r.zgrid).magnitude();
                x.snapshot_files.emplace_back(
                    "snapshot_t" + tag + "_z.tsv",
                    head + "# |beta(z, z')|: rows z, columns z' (branch blocks summed in quadrature)\n" +
                        matrix_table("z\\z'", z, z, zmag));
                std::string branch_row = "# branch sign per column (+1 right-going, -1 left-going):";
                for (double b : mode_branch_signs(grid)) (branch_row += ' ') += format_double(b);
                x.snapshot_files.emplace_back(
                    "snapshot_t" + tag + "_k.tsv",
                    head + "# |beta(k, k')| = |C^g|: rows and columns are flat modes labelled by kappa\n" +
                        branch_row + "\n" + matrix_table("kappa\\kappa'", kap, kap, c.amp_gg.cwiseAbs()));
            }
        }
    } else {
        const SingleExcitationState s0 = r.kind == InputKind::SinglePhoton
                                             ? build_single_photon_state(r.input.pulse1, grid, r.params)
                                             : build_excited_emitter_state(grid);
        const auto traj = evolve(s0, r.integrator, grid, r.params,
                                 [&](const SingleExcitationState& s, std::size_t k) { record_density(s, k); });
        fill_common<SingleExcitationState>(x, traj, 1.0);
        const auto c = directional_counts(traj.final_state, grid);
        auto& rep = sum.report;
        rep = ScatterReport{};
        rep.T_R = c.N_R;
        rep.T_L = c.N_L;
        rep.P_RR = rep.P_LL = rep.P_LR = rep.F_plus = rep.F_minus = kNaN;
        rep.P_e_max = max_excitation(traj);
        rep.residual_P_e = excitation_probability(traj.final_state);
        rep.long_time_reached = rep.residual_P_e <= kLongTimeThreshold;
        if (with_files && cfg.output.snapshots) {
            const auto kap = mode_kappas(grid);
            const auto sign = mode_branch_signs(grid);
            for (const auto& st : traj.checkpoints) {
                std::string body = header_block("single-excitation amplitude at t = " + format_double(st.time),
                                                grid, r.params);
                body += "# |c_e| = " + format_double(std::abs(st.emitter)) + "\nbranch\tkappa\t|c(k)|\n";
                for (std::size_t m = 0; m < grid.modes(); ++m)
                    body += format_double(sign[m]) + '\t' + format_double(kap[m]) + '\t' +
                            format_double(std::abs(st.photon[static_cast<Eigen::Index>(m)])) + '\n';
                x.snapshot_files.emplace_back("snapshot_t" + time_tag(st.time) + "_k.tsv", std::move(body));
            }
        }
    }
    return x;
}

std::string series_table(const Execution& x, InputKind kind) {
    const double quanta = kind == InputKind::TwoPhoton ? 2.0 : 1.0;
    std::string out = "t\tP_e\tN_R\tN_L\tT_R\tT_L\tnorm\n";
    for (const auto& p : x.series) {
        out += format_double(p.t);
        for (double v : {p.P_e, p.N_R, p.N_L, p.N_R / quanta, p.N_L / quanta, p.norm})
            (out += '\t') += format_double(v);
        out += '\n';
    }
    return out;
}

json metadata(const RunConfig& cfg, const Execution& x, const std::vector<std::string>& files) {
    const auto& s = x.summary;
    const auto& r = s.resolved;
    json j;
    j["tool"] = "wgscatter";
    j["version"] = version_string();
    j["units"] = "gamma = v_g = 1: t in 1/gamma, z in v_g/gamma, kappa in gamma/v_g";
    j["config"] = serialize(cfg);
    j["input_kind"] = to_string(r.kind);
    j["grid"] = grid_json(r.grid);
    json coupling = {{"g", s.coupling.g}, {"source", s.coupling.source}};
    if (s.coupling.calibration) coupling["calibration"] = calibration_json(*s.coupling.calibration);
    j["coupling"] = coupling;
    j["physics"] = {{"gamma", r.params.gamma}, {"group_velocity", r.params.group_velocity}};
    if (r.params.k0) j["physics"]["k0"] = *r.params.k0;
    if (r.kind != InputKind::ExcitedEmitter) {
        j["pulse1"] = pulse_json(r.input.pulse1);
        if (r.kind == InputKind::TwoPhoton) {
            j["pulse2"] = pulse_json(r.input.pulse2);
            if (r.input.sigma_p.is_uncorrelated())
                j["sigma_p"] = "inf";
            else
                j["sigma_p"] = r.input.sigma_p.value();
        }
    }
    j["integrator"] = {{"dt_requested", r.integrator.dt},
                       {"dt_used", s.dt_used},
                       {"steps", s.steps},
                       {"t_end", r.integrator.t_end},
                       {"checkpoints", r.integrator.checkpoint_times},
                       {"observable_stride", r.integrator.observable_stride}};
    j["z_grid"] = {{"z_min", r.zgrid.z_min}, {"z_max", r.zgrid.z_max}, {"n_z", r.zgrid.n_z}};
    j["files"] = files;
    return j;
}

}  // namespace

CouplingChoice choose_coupling(const RunConfig& cfg, const ResolvedRun& resolved) {
    CouplingChoice c;
    switch (cfg.physics.coupling.mode) {
        case CouplingSpec::Mode::Fixed:
            c.g = cfg.physics.coupling.value;
            c.source = "fixed";
            break;
        case CouplingSpec::Mode::Analytic:
            c.g = analytic_coupling(resolved.params.gamma, resolved.params.group_velocity);
            c.source = "analytic";
            break;
        case CouplingSpec::Mode::Record:
            c.g = read_record_coupling(cfg.physics.coupling.record, resolved);
            c.source = "record";
            break;
        case CouplingSpec::Mode::Calibrate:
            c.calibration = calibrate_coupling(resolved.params.gamma, resolved.grid, resolved.params);
            c.g = c.calibration->coupling;
            c.source = "calibrate";
            break;
    }
    return c;
}

RunSummary simulate(const RunConfig& cfg) { return execute(cfg, false).summary; }

std::string format_report(const RunSummary& s) {
    std::string out = "# scatter report; probabilities are dimensionless\n";
    auto kv = [&](const char* k, double v) { ((out += k) += " = ") += format_double(v) + "\n"; };
    out += "input_kind = " + to_string(s.resolved.kind) + "\n";
    kv("g", s.coupling.g);
    kv("T_R", s.report.T_R);
    kv("T_L", s.report.T_L);
    if (s.resolved.kind == InputKind::TwoPhoton) {
        kv("P_RR", s.report.P_RR);
        kv("P_LL", s.report.P_LL);
        kv("P_LR", s.report.P_LR);
        kv("F_plus", s.report.F_plus);
        kv("F_minus", s.report.F_minus);
    }
    kv("P_e_max", s.report.P_e_max);
    kv("residual_P_e", s.report.residual_P_e);
    out += std::string("long_time_reached = ") + (s.report.long_time_reached ? "true" : "false") + "\n";
    kv("max_bookkeeping_error", s.max_bookkeeping_error);
    kv("max_norm_error", s.max_norm_error);
    kv("t_end", s.resolved.integrator.t_end);
    kv("dt_used", s.dt_used);
    out += "steps = " + std::to_string(s.steps) + "\n";
    return out;
}

RunOutputs run(const RunConfig& cfg) {
    Execution x = execute(cfg, true);
    const auto& r = x.summary.resolved;
    const fs::path dir = cfg.output.directory;
    StagingArea stage(dir);

    std::vector<std::string> files;
    auto put = [&](const std::string& name, const std::string& content) {
        stage.write(name, content);
        files.push_back(name);
    };
    const std::string kind = to_string(r.kind);
    if (cfg.output.series)
        put("series.tsv", header_block("scalar series, " + kind + " input", r.grid, r.params) +
                              "# T_R, T_L = N_R, N_L per photon; norm = total probability\n" +
                              series_table(x, r.kind));
    if (cfg.output.density) {
        put("density.tsv", header_block("photon density N(z, t), " + kind + " input", r.grid, r.params) +
                               "# rows: t; columns: z; branches summed " +
                               (r.zgrid.include_cross_branch ? "coherently with carrier k0\n" : "incoherently\n") +
                               density_table(x.density));
        if (cfg.output.density_binary) put("density.bin", density_binary(x.density));
    }
    for (const auto& [name, body] : x.snapshot_files) put(name, body);
    if (cfg.output.report) put("report.txt", format_report(x.summary));
    files.push_back("metadata.json");
    stage.write("metadata.json", metadata(cfg, x, files).dump(2) + "\n");
    stage.commit();
    std::error_code ec;
    fs::remove(dir / "error.json", ec);
    return {std::move(x.summary), std::move(x.density), dir};
}

CalibrationResult calibrate(const RunConfig& cfg) {
    const ResolvedRun r = resolve(cfg);
    const CalibrationResult c = calibrate_coupling(r.params.gamma, r.grid, r.params);
    json j;
    j["tool"] = "wgscatter";
    j["version"] = version_string();
    j["gamma"] = r.params.gamma;
    j["group_velocity"] = r.params.group_velocity;
    j["grid"] = grid_json(r.grid);
    j["coupling"] = c.coupling;
    j["calibration"] = calibration_json(c);
    StagingArea stage(cfg.output.directory);
    stage.write("calibration.json", j.dump(2) + "\n");
    stage.commit();
    std::error_code ec;
    fs::remove(fs::path(cfg.output.directory) / "error.json", ec);
    return c;
}

ErrorInfo classify_current_exception() {
    ErrorInfo e;
    try {
        throw;
    } catch (const ParseError& ex) {
        e = {kExitConfigError, "config_error", ex.what(), {}, ex.line()};
    } catch (const FieldError& ex) {
        e = {kExitConfigError, "config_error", ex.what(), ex.field(), 0};
    } catch (const ConfigError& ex) {
        e = {kExitConfigError, "config_error", ex.what(), {}, 0};
    } catch (const NumericalError& ex) {
        e = {kExitNumericalError, "numerical_error", ex.what(), {}, 0};
    } catch (const fs::filesystem_error& ex) {
        e = {1, "io_error", ex.what(), {}, 0};
    } catch (const std::exception& ex) {
        e = {1, "internal_error", ex.what(), {}, 0};
    } catch (...) {
        e = {1, "internal_error", "unknown exception", {}, 0};
    }
    return e;
}

std::string error_record(const ErrorInfo& e) {
    json j = {{"exit_code", e.exit_code}, {"kind", e.kind}, {"message", e.message}};
    if (!e.field.empty()) j["field"] = e.field;
    if (e.line > 0) j["line"] = e.line;
    return j.dump(2) + "\n";
}

void write_error_record(const fs::path& dir, const ErrorInfo& e) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    try {
        write_file_atomic(dir / "error.json", error_record(e));
    } catch (...) {
        // The message still reaches stderr.
    }
}

namespace {

template <typename F>
int guarded(const RunConfig& cfg, std::ostream& err, F&& body) {
    try {
        body();
        return kExitSuccess;
    } catch (...) {
        const ErrorInfo e = classify_current_exception();
        write_error_record(cfg.output.directory, e);
        err << "error (" << e.kind << "): " << e.message << "\n";
        return e.exit_code;
    }
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded(cfg, err, [&] {
        const auto out = run(cfg);
        const auto& s = out.summary;
        log << "grid: n_per_branch = " << s.resolved.grid.n_per_branch()
            << ", kappa_max = " << format_double(s.resolved.grid.kappa_max())
            << ", dk = " << format_double(s.resolved.grid.dk()) << "\n"
            << "coupling: g = " << format_double(s.coupling.g) << " (" << s.coupling.source << ")\n"
            << format_report(s) << "wrote " << out.directory.string() << "\n";
    });
}

int calibrate_command(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded(cfg, err, [&] {
        const auto c = calibrate(cfg);
        log << "g = " << format_double(c.coupling) << " (analytic guess " << format_double(c.initial_guess)
            << ", " << c.iterations << " iterations)\n"
            << "fitted rate = " << format_double(c.fit.rate) << ", rms log residual = "
            << format_double(c.fit.rms_log_residual) << "\n"
            << "wrote " << (fs::path(cfg.output.directory) / "calibration.json").string() << "\n";
    });
}

}  // namespace wgscatter
