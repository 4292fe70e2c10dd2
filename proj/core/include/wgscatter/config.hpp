#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wgscatter/dynamics.hpp"
#include "wgscatter/grid.hpp"
#include "wgscatter/observables.hpp"
#include "wgscatter/wavepackets.hpp"

namespace wgscatter {

// How the run obtains g.
struct CouplingSpec {
    enum class Mode { Calibrate, Analytic, Fixed, Record };
    Mode mode = Mode::Calibrate;
    double value = 0.0;     // Mode::Fixed
    std::string record;     // Mode::Record: path to a calibration.json

    bool operator==(const CouplingSpec&) const = default;
};

struct PhysicsSection {
    double gamma = 1.0;
    double group_velocity = 1.0;
    std::optional<double> k0;
    CouplingSpec coupling;

    bool operator==(const PhysicsSection&) const = default;
};

// Unset fields are chosen from the input pulses (see resolve()).
// n_per_branch and dk are alternatives; at most one may be given.
struct GridSection {
    std::optional<double> kappa_max;
    std::optional<double> dk;
    std::optional<std::size_t> n_per_branch;

    bool operator==(const GridSection&) const = default;
};

enum class InputKind { TwoPhoton, SinglePhoton, ExcitedEmitter };

struct PulseSection {
    double sigma = 1.0;
    std::optional<double> z0;  // unset: on the incoming side, auto_start_distance(sigma) away
    double delta = 0.0;
    Branch direction = Branch::RightGoing;
    bool allow_outgoing_start = false;

    bool operator==(const PulseSection&) const = default;
};

struct InputSection {
    InputKind kind = InputKind::TwoPhoton;
    // sigma_p; unset means uncorrelated.
    std::optional<double> sigma_p;
    // sigma_p = sigma_p_relative * pulse1.sigma; excludes sigma_p.
    std::optional<double> sigma_p_relative;
    PulseSection pulse1;
    PulseSection pulse2;

    bool operator==(const InputSection&) const = default;
};

struct IntegratorSection {
    std::optional<double> dt;     // unset: default_time_step(grid)
    std::optional<double> t_end;  // unset: auto_end_time of the farthest pulse
    std::vector<double> checkpoints;
    std::size_t observable_stride = 1;
    int workers = 1;

    bool operator==(const IntegratorSection&) const = default;
};

struct OutputSection {
    std::string directory = "out";
    bool series = true;
    bool density = true;
    bool density_binary = false;
    // Time between density-map rows; rows land on the nearest step.
    double density_interval = 1.0;
    bool snapshots = true;
    bool report = true;
    double z_min = -20.0;
    double z_max = 20.0;
    std::size_t n_z = 401;
    bool include_cross_branch = false;

    bool operator==(const OutputSection&) const = default;
};

struct SweepSection {
    std::string parameter;  // sigma, sigma_p, separation, delta
    std::vector<double> values;

    bool operator==(const SweepSection&) const = default;
};

struct RunConfig {
    PhysicsSection physics;
    GridSection grid;
    InputSection input;
    IntegratorSection integrator;
    OutputSection output;
    SweepSection sweep;

    bool operator==(const RunConfig&) const = default;
};

// "section.key=value" pairs applied after the file is read, as if they were
// appended to the named section.
using Overrides = std::vector<std::pair<std::string, std::string>>;

// Parses "section.key=value" into an override. Throws ConfigError.
std::pair<std::string, std::string> parse_override(std::string_view text);

// Line-oriented INI: [section] headers, key = value, '#' or ';' comments.
// Unknown sections or keys, duplicates and malformed values are errors
// (ParseError carries the line; overrides report line 0). The result is
// validated (FieldError names the field).
RunConfig parse_config(std::string_view text, const Overrides& overrides = {});
RunConfig load_config(const std::string& path, const Overrides& overrides = {});

// Canonical text; parse_config(serialize(c)) == c for every valid c.
std::string serialize(const RunConfig& cfg);

// Field-level checks that do not need the resolved grid.
void validate(const RunConfig& cfg);

// Everything the engine needs, with auto values filled in. The coupling is
// left at zero when the config asks for calibration.
struct ResolvedRun {
    PhysicalParams params;
    Grid grid = Grid::build(2, 1.0);  // replaced by resolve()
    InputKind kind = InputKind::TwoPhoton;
    TwoPhotonInputSpec input;  // pulse2 unused for single-photon input
    IntegratorConfig integrator;
    ZGrid zgrid;
};

ResolvedRun resolve(const RunConfig& cfg);

// Applies one sweep value to a copy of the template.
//   sigma:      both pulse widths (sigma_p_relative follows)
//   sigma_p:    phase-matching width; inf for uncorrelated
//   separation: co-propagating: pulse2 trails pulse1 by this distance;
//               counter-propagating: pulses at -sep/2 and +sep/2
//   delta:      both carrier detunings
RunConfig apply_sweep_value(const RunConfig& base, const std::string& parameter, double value);

bool is_sweepable(const std::string& parameter);

std::string to_string(InputKind k);

// Shortest round-trip decimal form of a double ("inf", "-inf", "nan" for the
// non-finite values).
std::string format_double(double x);

}  // namespace wgscatter
