// wgscatter: run, sweep, calibrate and validate waveguide scattering configs.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wgscatter/config.hpp"
#include "wgscatter/run.hpp"
#include "wgscatter/sweep.hpp"

namespace {

struct Common {
    std::string config;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::vector<std::string> set;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "INI config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", c.out, "Output directory (overrides output.directory)");
    cmd->add_option("-w,--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("-s,--set", c.set, "Override, section.key=value (repeatable)");
}

// Loads the config with --set and --out/--workers folded in as overrides, so
// that they go through the same validation as file values.
wgscatter::RunConfig load(const Common& c) {
    wgscatter::Overrides ov;
    for (const auto& s : c.set) ov.push_back(wgscatter::parse_override(s));
    if (c.out) ov.emplace_back("output.directory", *c.out);
    if (c.workers) ov.emplace_back("integrator.workers", std::to_string(*c.workers));
    return wgscatter::load_config(c.config, ov);
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (item == "inf") {
            out.push_back(std::numeric_limits<double>::infinity());
        } else {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// Config loading failures share the exit-code table with run failures. When
// the output directory is known from the command line, the error record goes
// there too.
template <typename F>
int with_config(const Common& c, bool record, F&& body) {
    try {
        const wgscatter::RunConfig cfg = load(c);
        return body(cfg);
    } catch (...) {
        const auto e = wgscatter::classify_current_exception();
        std::cerr << "error (" << e.kind << "): " << e.message << "\n";
        if (record && c.out) wgscatter::write_error_record(*c.out, e);
        return e.exit_code;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-photon scattering on a two-level emitter in a waveguide"};
    app.set_version_flag("--version", wgscatter::version_string());
    app.require_subcommand(1);

    Common run_opts, sweep_opts, cal_opts, val_opts;
    auto* run = app.add_subcommand("run", "Evolve one configuration and write all outputs");
    add_common(run, run_opts);

    auto* sweep = app.add_subcommand("sweep", "Scan one parameter; resumable");
    add_common(sweep, sweep_opts);
    std::optional<std::string> param, values;
    sweep->add_option("-p,--param", param, "sigma, sigma_p, separation or delta (default: [sweep] parameter)");
    sweep->add_option("-v,--values", values, "Comma-separated values (default: [sweep] values)");

    auto* cal = app.add_subcommand("calibrate", "Calibrate the coupling on the configured grid");
    add_common(cal, cal_opts);

    auto* val = app.add_subcommand("validate", "Check a config and print it with defaults resolved");
    add_common(val, val_opts);

    CLI11_PARSE(app, argc, argv);

    if (*run)
        return with_config(run_opts, true, [](const auto& cfg) { return wgscatter::run_command(cfg, std::cout, std::cerr); });
    if (*cal)
        return with_config(cal_opts, true,
                           [](const auto& cfg) { return wgscatter::calibrate_command(cfg, std::cout, std::cerr); });
    if (*val)
        return with_config(val_opts, false, [](const auto& cfg) {
            std::cout << wgscatter::serialize(cfg);
            const auto r = wgscatter::resolve(cfg);
            std::cout << "\n# resolved: n_per_branch = " << r.grid.n_per_branch()
                      << ", kappa_max = " << wgscatter::format_double(r.grid.kappa_max())
                      << ", dk = " << wgscatter::format_double(r.grid.dk())
                      << ", dt = " << wgscatter::format_double(r.integrator.dt)
                      << ", t_end = " << wgscatter::format_double(r.integrator.t_end) << "\n";
            return 0;
        });
    return with_config(sweep_opts, true, [&](const auto& cfg) {
        auto opts = wgscatter::sweep_options_from(cfg);
        if (param) opts.parameter = *param;
        if (values) {
            try {
                opts.values = parse_values(*values);
            } catch (const std::exception&) {
                std::cerr << "error (config_error): --values must be comma-separated numbers\n";
                return static_cast<int>(wgscatter::kExitConfigError);
            }
        }
        return wgscatter::sweep_command(cfg, opts, std::cout, std::cerr);
    });
}
