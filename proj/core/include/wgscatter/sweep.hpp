#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wgscatter/config.hpp"
#include "wgscatter/observables.hpp"

namespace wgscatter {

struct SweepRow {
    std::size_t index = 0;
    double value = 0.0;
    bool ok = false;
    bool resumed = false;  // taken from the journal rather than recomputed
    double coupling = 0.0;
    ScatterReport report;
    std::string error;
};

struct SweepOptions {
    std::string parameter;
    std::vector<double> values;
    std::filesystem::path directory;
    // Sweep points run concurrently; each point itself runs single-threaded.
    int workers = 1;
};

struct SweepOutcome {
    std::vector<SweepRow> rows;  // in value-list order
    std::size_t failed = 0;
    std::size_t resumed = 0;
};

// Runs one simulation per value, writing `sweep.tsv` (one row per value, in
// input order) and appending each finished row to `journal.tsv`. A rerun in
// the same directory with the same template skips rows already journaled.
// Point failures are recorded in their row; the sweep carries on.
SweepOutcome sweep(const RunConfig& base, const SweepOptions& opts);

std::string sweep_table_header(const std::string& parameter);
std::string format_sweep_row(const SweepRow& row);

// Same fields as the CLI: template from the config, parameter and values
// from [sweep], directory from [output], workers from [integrator].
SweepOptions sweep_options_from(const RunConfig& cfg);

int sweep_command(const RunConfig& base, const SweepOptions& opts, std::ostream& log, std::ostream& err);

}  // namespace wgscatter
