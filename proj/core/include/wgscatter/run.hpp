#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "wgscatter/calibration.hpp"
#include "wgscatter/config.hpp"
#include "wgscatter/observables.hpp"
#include "wgscatter/output.hpp"

namespace wgscatter {

enum ExitCode : int {
    kExitSuccess = 0,
    kExitConfigError = 2,
    kExitNumericalError = 3,
    kExitPartialSweep = 4,
};

std::string version_string();

// The coupling the run will use, with the calibration that produced it.
struct CouplingChoice {
    double g = 0.0;
    std::string source;  // calibrate, analytic, fixed, record
    std::optional<CalibrationResult> calibration;
};

CouplingChoice choose_coupling(const RunConfig& cfg, const ResolvedRun& resolved);

// Scattering summary of a run. Pair-only entries are NaN for single-photon
// and excited-emitter inputs.
struct RunSummary {
    ScatterReport report;
    ResolvedRun resolved;
    CouplingChoice coupling;
    double dt_used = 0.0;
    std::size_t steps = 0;
    double max_bookkeeping_error = 0.0;  // max_t |N_R + N_L + P_e - number of quanta|
    double max_norm_error = 0.0;         // max_t |1 - norm|
};

// Evolves the configured input and returns the summary only (no files).
// This is what a sweep point runs.
RunSummary simulate(const RunConfig& cfg);

struct RunOutputs {
    RunSummary summary;
    DensityMap density;
    std::filesystem::path directory;
};

// Full run: evolves, then writes metadata.json, series.tsv, density.tsv
// (and density.bin), snapshot files and report.txt into cfg.output.directory.
// All files appear together or not at all. Throws on failure.
RunOutputs run(const RunConfig& cfg);

// Runs calibrate_coupling on the resolved grid and writes calibration.json.
CalibrationResult calibrate(const RunConfig& cfg);

// key = value lines.
std::string format_report(const RunSummary& s);

// Command wrappers: catch errors, map them to exit codes, write error.json
// into the output directory and a one-line message to `err`.
int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int calibrate_command(const RunConfig& cfg, std::ostream& log, std::ostream& err);

struct ErrorInfo {
    int exit_code = 1;
    std::string kind;  // config_error, numerical_error, io_error, internal_error
    std::string message;
    std::string field;  // FieldError only
    int line = 0;       // ParseError only
};

// Classifies the exception currently being handled. Call from a catch block.
ErrorInfo classify_current_exception();

// error.json: the ErrorInfo as a JSON object.
std::string error_record(const ErrorInfo& e);
void write_error_record(const std::filesystem::path& dir, const ErrorInfo& e);

}  // namespace wgscatter
