// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are the
// constants next to each check.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "wgscatter/calibration.hpp"
#include "wgscatter/config.hpp"
#include "wgscatter/dynamics.hpp"
#include "wgscatter/observables.hpp"
#include "wgscatter/oracles.hpp"
#include "wgscatter/output.hpp"
#include "wgscatter/run.hpp"
#include "wgscatter/sweep.hpp"
#include "wgscatter/wavepackets.hpp"

using namespace wgscatter;
namespace fs = std::filesystem;

namespace {

// Coincident resonant pair, sigma = 1, both at z = -3, uncorrelated.
const char* kCoincident = R"(
[physics]
coupling = calibrate
[pulse1]
sigma = 1
z0 = -3
[pulse2]
sigma = 1
z0 = -3
[integrator]
observable_stride = 1
[output]
snapshots = off
density_interval = 4
z_min = -40
z_max = 40
n_z = 1601
)";

const Overrides kSequential = {{"pulse2.z0", "-9"}};
const Overrides kCounter = {{"pulse1.sigma", "0.5"}, {"pulse2.sigma", "0.5"}, {"pulse1.z0", "-6"},
                            {"pulse2.z0", "6"},      {"pulse2.direction", "left"}};

fs::path scratch() {
    static const fs::path d = fs::temp_directory_path() / ("wgscatter_acceptance_" + std::to_string(::getpid()));
    return d;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Summaries are shared between criteria; key is a label.
std::map<std::string, RunSummary> g_runs;

const RunSummary& simulated(const std::string& label, const Overrides& o) {
    auto it = g_runs.find(label);
    if (it == g_runs.end()) it = g_runs.emplace(label, simulate(parse_config(kCoincident, o))).first;
    return it->second;
}

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (detail.tellp() > 0) detail << "; ";
        detail << what << (ok ? "" : " [violated]");
    }
};

// series.tsv column 2 is P_e; keyed by the time column text.
std::map<double, double> excitation_series(const fs::path& file) {
    std::map<double, double> out;
    std::istringstream in(read_file(file));
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::istringstream ls(line);
        double t, pe;
        ls >> t >> pe;
        out[t] = pe;
    }
    return out;
}

// 1: bookkeeping, norm and density integral for the three figure setups.
void conservation(Verdict& v) {
    constexpr double kBookkeeping = 1e-6;
    constexpr double kNorm = 1e-6;
    constexpr double kDensity = 1e-4;
    constexpr double kRuntime = 120.0;
    const std::vector<std::pair<std::string, Overrides>> setups = {
        {"coincident", {}}, {"sequential", kSequential}, {"counter", kCounter}};
    for (const auto& [label, o] : setups) {
        Overrides with_dir = o;
        with_dir.emplace_back("output.directory", (scratch() / label).string());
        const auto t0 = std::chrono::steady_clock::now();
        const RunOutputs out = run(parse_config(kCoincident, with_dir));
        const double elapsed = seconds_since(t0);
        g_runs.emplace(label, out.summary);

        const auto pe = excitation_series(out.directory / "series.tsv");
        double worst = 0.0;
        const auto& m = out.density;
        const double dz = m.z[1] - m.z[0];
        for (std::size_t it = 0; it < m.times.size(); ++it) {
            double integral = 0.0;
            for (std::size_t iz = 0; iz < m.z.size(); ++iz)
                integral += (iz == 0 || iz + 1 == m.z.size() ? 0.5 : 1.0) * m.at(it, iz) * dz;
            const auto p = pe.lower_bound(m.times[it] - 1e-9);
            if (p == pe.end()) throw std::runtime_error("density time missing from series");
            worst = std::max(worst, std::abs(integral - (2.0 - p->second)));
        }
        const auto& s = out.summary;
        v.require(s.max_bookkeeping_error <= kBookkeeping, label + " bookkeeping " + fmt(s.max_bookkeeping_error));
        v.require(s.max_norm_error <= kNorm, label + " norm " + fmt(s.max_norm_error));
        v.require(worst <= kDensity, label + " density " + fmt(worst) + " over " + std::to_string(m.times.size()) +
                                         " times");
        v.require(elapsed <= kRuntime, label + " " + fmt(elapsed) + " s");
    }
}

// 2: calibrated decay and the analytic starting guess.
void calibration(Verdict& v) {
    constexpr double kRateError = 0.01;
    constexpr double kGuessError = 0.05;
    const ResolvedRun r = resolve(parse_config(kCoincident));
    const CalibrationResult c = calibrate_coupling(1.0, r.grid, r.params);
    PhysicalParams p = r.params;
    p.coupling = c.coupling;
    const DecayFit fit = measure_emitter_decay(r.grid, p, 1.0);
    const double guess = std::abs(c.initial_guess / c.coupling - 1.0);
    v.require(fit.rate_error <= kRateError, "rate error " + fmt(fit.rate_error) + " (rms log residual " +
                                                fmt(fit.rms_log_residual) + ")");
    v.require(guess <= kGuessError, "g guess " + fmt(c.initial_guess) + " vs calibrated " + fmt(c.coupling) +
                                        " (" + fmt(100 * guess) + "%)");
}

// 3: single-excitation engine against the Lorentzian quadrature, and the
// narrow-band reflection limit.
void single_photon(Verdict& v) {
    constexpr double kRelative = 0.01;
    // Resonant transmission ~ 2 sigma^2 for narrow pulses; the converged
    // ladder below reaches 0.005 at sigma = 0.05.
    constexpr double kMonochromatic = 0.02;

    const ResolvedRun r = resolve(parse_config(kCoincident));
    PhysicalParams p = r.params;
    p.coupling = calibrate_coupling(1.0, r.grid, p).coupling;
    for (double sigma : {0.2, 0.5, 1.0}) {
        PulseSpec pulse;
        pulse.sigma = sigma;
        pulse.z0 = -auto_start_distance(sigma);
        IntegratorConfig cfg;
        cfg.dt = default_time_step(r.grid, p);
        cfg.t_end = auto_end_time(-pulse.z0, sigma);
        const SinglePhotonResult sim = single_photon_scatter(pulse, r.grid, p, cfg);
        const double oracle = lorentzian_transmission(pulse, p);
        const double rel = std::abs(sim.T / oracle - 1.0);
        v.require(rel <= kRelative, "sigma " + fmt(sigma) + ": T " + fmt(sim.T) + " vs " + fmt(oracle));
    }

    const Grid fine = Grid::build(1601, 10.0);
    PhysicalParams pf = r.params;
    pf.coupling = calibrate_coupling(1.0, fine, pf).coupling;
    const auto ladder = monochromatic_limit_sweep({0.05, 0.1, 0.2, 0.4}, fine, pf, default_time_step(fine, pf));
    v.require(strictly_increasing_transmission(ladder), "ladder T increases with sigma");
    std::string rungs;
    for (const auto& q : ladder) rungs += fmt(q.sigma) + ":" + fmt(q.T_simulated) + " ";
    v.require(ladder.front().T_simulated < kMonochromatic, "sigma 0.05 T " + fmt(ladder.front().T_simulated) +
                                                               " < " + fmt(kMonochromatic) + " (" + rungs + ")");
}

// 4: two-photon sectors versus products of single-photon outcomes.
void factorization(Verdict& v) {
    constexpr double kMaterial = 0.01;
    const ResolvedRun r = resolve(parse_config(kCoincident));
    PhysicalParams p = r.params;
    p.coupling = calibrate_coupling(1.0, r.grid, p).coupling;
    std::vector<double> dev;
    for (double sep : {0.0, 6.0, 12.0}) {
        IntegratorConfig cfg;
        cfg.dt = default_time_step(r.grid, p);
        cfg.t_end = auto_end_time(3.0 + sep, 1.0);
        dev.push_back(factorization_check(sep, 1.0, r.grid, p, cfg).max_deviation);
    }
    v.require(dev[0] > kMaterial, "sep 0 deviation " + fmt(dev[0]));
    v.require(dev[1] < dev[0], "sep 6 " + fmt(dev[1]));
    v.require(dev[2] < dev[1], "sep 12 " + fmt(dev[2]));
}

// 5: coincident co-propagating width sweep.
void width_sweep(Verdict& v) {
    constexpr double kRuntime = 600.0;
    constexpr double kLargeRR = 0.5;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> sigmas{0.2, 0.5, 1.0, 2.0, 5.0};
    RunConfig base = parse_config(kCoincident);
    base.input.pulse1.z0.reset();
    base.input.pulse2.z0.reset();
    std::vector<ScatterReport> rep;
    std::string table;
    for (double s : sigmas) {
        rep.push_back(simulate(apply_sweep_value(base, "sigma", s)).report);
        table += fmt(s) + ":" + fmt(rep.back().P_e_max) + "/" + fmt(rep.back().P_RR) + "/" + fmt(rep.back().P_LR) +
                 " ";
    }
    const auto peak = std::max_element(rep.begin(), rep.end(), [](const auto& a, const auto& b) {
                          return a.P_e_max < b.P_e_max;
                      }) - rep.begin();
    const auto& one = rep[2];
    v.require(sigmas[static_cast<std::size_t>(peak)] == 1.0, "argmax P_e_max at sigma " +
                                                                 fmt(sigmas[static_cast<std::size_t>(peak)]));
    v.require(one.P_LR > one.P_RR && one.P_LR > one.P_LL, "sigma 1 P_LR " + fmt(one.P_LR) + " dominates");
    v.require(rep.back().P_RR > kLargeRR, "sigma 5 P_RR " + fmt(rep.back().P_RR));
    const double elapsed = seconds_since(t0);
    v.require(elapsed <= kRuntime, fmt(elapsed) + " s (sigma: P_e_max/P_RR/P_LR " + table + ")");
}

// 6: counter-propagating beam-splitter signature.
void beam_splitter(Verdict& v) {
    constexpr double kMirror = 1e-6;
    const ScatterReport& r = simulated("counter", kCounter).report;
    v.require(r.P_LR < r.P_RR, "P_LR " + fmt(r.P_LR) + " < P_RR " + fmt(r.P_RR));
    v.require(std::abs(r.P_RR - r.P_LL) <= kMirror, "|P_RR - P_LL| " + fmt(std::abs(r.P_RR - r.P_LL)));
}

// 7: Bell fidelity against the spectral width.
void fidelity(Verdict& v) {
    const std::vector<double> sigmas{0.1, 0.5, 1.0, 2.0, 5.0};
    RunConfig base = parse_config(kCoincident);
    base.input.pulse1.z0.reset();
    base.input.pulse2.z0.reset();
    base.input.pulse2.direction = Branch::LeftGoing;
    std::vector<double> f;
    std::string table;
    for (double s : sigmas) {
        f.push_back(simulate(apply_sweep_value(base, "sigma", s)).report.F_plus);
        table += fmt(s) + ":" + fmt(f.back()) + " ";
    }
    const std::size_t peak = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
    bool unimodal = true;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        if (i < peak ? !(f[i] < f[i + 1]) : !(f[i] > f[i + 1])) unimodal = false;
    v.require(unimodal, "F+ unimodal (" + table + ")");
    v.require(sigmas[peak] == 0.5 || sigmas[peak] == 1.0, "peak at sigma " + fmt(sigmas[peak]));
    v.require(f.front() < 0.5 * f[peak] && f.back() < 0.5 * f[peak], "endpoints below half the peak");

    RunConfig at_peak = apply_sweep_value(base, "sigma", sigmas[peak]);
    at_peak.input.sigma_p_relative = 0.5;
    const double correlated = simulate(at_peak).report.F_plus;
    v.require(f[peak] >= correlated, "uncorrelated " + fmt(f[peak]) + " >= correlated " + fmt(correlated));

    const ResolvedRun r = resolve(at_peak);
    const BellFidelities in = bell_fidelities(build_two_photon_state(r.input, r.grid, r.params), r.grid);
    v.require(in.F_plus == 0.0 && in.F_minus == 0.0, "input fidelity " + fmt(in.F_plus));
}

// 8: time-step order and grid convergence on the coincident setup.
void convergence(Verdict& v) {
    constexpr double kOrderRatio = 8.0;
    constexpr double kGridChange = 1e-3;
    const RunSummary& base = simulated("coincident", {});
    const RunSummary half_dt =
        simulate(parse_config(kCoincident, {{"integrator.dt", format_double(0.5 * base.dt_used)}}));
    const double ratio = base.max_norm_error / half_dt.max_norm_error;
    v.require(ratio >= kOrderRatio, "norm drift " + fmt(base.max_norm_error) + " -> " +
                                        fmt(half_dt.max_norm_error) + " (x" + fmt(ratio) + ")");

    const Grid& g = base.resolved.grid;
    const RunSummary dense = simulate(parse_config(
        kCoincident, {{"grid.kappa_max", format_double(g.kappa_max())},
                      {"grid.n_per_branch", std::to_string(2 * g.n_per_branch() - 1)},
                      {"integrator.dt", format_double(base.dt_used)}}));
    const auto& a = base.report;
    const auto& b = dense.report;
    const double change =
        std::max({std::abs(a.P_RR - b.P_RR), std::abs(a.P_LL - b.P_LL), std::abs(a.P_LR - b.P_LR)});
    v.require(change < kGridChange, "n " + std::to_string(g.n_per_branch()) + " -> " +
                                        std::to_string(dense.resolved.grid.n_per_branch()) + ": max |dP| " +
                                        fmt(change));
}

// 9: sweep tables independent of the worker count.
void determinism(Verdict& v) {
    const char* small = R"(
[physics]
coupling = calibrate
[grid]
kappa_max = 10
n_per_branch = 101
[pulse1]
sigma = 1
z0 = -3
[pulse2]
sigma = 1
z0 = -3
[integrator]
t_end = 12
)";
    const std::vector<double> values{0.6, 0.8, 1.0, 1.2, 1.4};
    std::vector<std::string> tables;
    for (int workers : {1, 3}) {
        const fs::path dir = scratch() / ("sweep_w" + std::to_string(workers));
        sweep(parse_config(small), {"sigma", values, dir, workers});
        tables.push_back(read_file(dir / "sweep.tsv"));
    }
    v.require(tables[0] == tables[1], "workers 1 vs 3: " + std::to_string(tables[0].size()) + " bytes, identical");
}

}  // namespace

// Optional arguments select criteria by number; default is all.
int main(int argc, char** argv) {
    const std::vector<std::pair<int, std::function<void(Verdict&)>>> criteria = {
        {1, conservation}, {2, calibration}, {3, single_photon}, {4, factorization}, {5, width_sweep},
        {6, beam_splitter}, {7, fidelity},   {8, convergence},   {9, determinism}};
    fs::create_directories(scratch());
    int failed = 0;
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    for (const auto& [n, check] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            check(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        if (!v.pass) ++failed;
        std::printf("%s criterion %d: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", n, v.detail.str().c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::error_code ec;
    fs::remove_all(scratch(), ec);
    return failed == 0 ? 0 : 1;
}
