#include "wgscatter/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "wgscatter/errors.hpp"
#include "wgscatter/output.hpp"
#include "wgscatter/run.hpp"

namespace wgscatter {

namespace fs = std::filesystem;

namespace {

constexpr const char* kColumns =
    "status\tg\tT_R\tT_L\tP_RR\tP_LL\tP_LR\tP_e_max\tF_plus\tF_minus\tresidual_P_e\tlong_time_reached\terror";

// FNV-1a; identifies the template a journal belongs to.
std::string fingerprint(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string template_text(const RunConfig& base, const std::string& parameter) {
    RunConfig t = base;
    t.output = OutputSection{};
    t.sweep = SweepSection{};
    t.integrator.workers = 1;
    return "parameter = " + parameter + "\n" + serialize(t);
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return s;
}

class Journal {
public:
    Journal(const fs::path& path, const std::string& id) : path_(path), id_(id) {}

    // Completed rows keyed by (index, formatted value).
    std::map<std::pair<std::size_t, std::string>, std::string> load() {
        std::map<std::pair<std::size_t, std::string>, std::string> rows;
        std::ifstream in(path_);
        if (!in) return rows;
        std::string line;
        if (!std::getline(in, line)) return rows;
        if (line != "# journal " + id_)
            throw ConfigError("journal " + path_.string() +
                              " belongs to a different sweep template; use a fresh output directory");
        while (std::getline(in, line)) {
            if (line.empty() || line.front() == '#') continue;
            std::istringstream ls(line);
            std::string idx, value, status;
            std::getline(ls, idx, '\t');
            std::getline(ls, value, '\t');
            std::getline(ls, status, '\t');
            // A torn last line (interrupted write) fails this check and is recomputed.
            if (status != "ok" || std::count(line.begin(), line.end(), '\t') != 14) continue;
            rows[{std::stoul(idx), value}] = line;
        }
        return rows;
    }

    void open_for_append() {
        const bool fresh = !fs::exists(path_) || fs::file_size(path_) == 0;
        out_.open(path_, std::ios::app);
        if (!out_) throw std::runtime_error("cannot open journal " + path_.string());
        if (fresh) out_ << "# journal " << id_ << "\n" << std::flush;
    }

    void append(const std::string& row) {
        std::lock_guard lock(mutex_);
        out_ << row << "\n" << std::flush;
    }

private:
    fs::path path_;
    std::string id_;
    std::ofstream out_;
    std::mutex mutex_;
};

SweepRow parse_row(const std::string& line) {
    std::istringstream ls(line);
    std::vector<std::string> f;
    for (std::string cell; std::getline(ls, cell, '\t');) f.push_back(cell);
    f.resize(15);
    auto num = [](const std::string& s) { return s == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(s); };
    SweepRow r;
    r.index = std::stoul(f[0]);
    r.value = num(f[1]);
    r.ok = f[2] == "ok";
    r.resumed = true;
    r.coupling = num(f[3]);
    auto& p = r.report;
    p.T_R = num(f[4]);
    p.T_L = num(f[5]);
    p.P_RR = num(f[6]);
    p.P_LL = num(f[7]);
    p.P_LR = num(f[8]);
    p.P_e_max = num(f[9]);
    p.F_plus = num(f[10]);
    p.F_minus = num(f[11]);
    p.residual_P_e = num(f[12]);
    p.long_time_reached = f[13] == "true";
    r.error = f[14];
    return r;
}

}  // namespace

std::string sweep_table_header(const std::string& parameter) {
    return std::string("index\t") + parameter + "\t" + kColumns + "\n";
}

std::string format_sweep_row(const SweepRow& row) {
    std::string out = std::to_string(row.index) + "\t" + format_double(row.value) + "\t" + (row.ok ? "ok" : "error");
    const auto& p = row.report;
    for (double v : {row.coupling, p.T_R, p.T_L, p.P_RR, p.P_LL, p.P_LR, p.P_e_max, p.F_plus, p.F_minus,
                     p.residual_P_e})
        (out += '\t') += row.ok ? format_double(v) : "nan";
    out += row.ok ? (p.long_time_reached ? "\ttrue" : "\tfalse") : "\tfalse";
    out += "\t" + (row.error.empty() ? std::string("-") : sanitize(row.error));
    return out;
}

SweepOptions sweep_options_from(const RunConfig& cfg) {
    return {cfg.sweep.parameter, cfg.sweep.values, cfg.output.directory, cfg.integrator.workers};
}

SweepOutcome sweep(const RunConfig& base, const SweepOptions& opts) {
    if (!is_sweepable(opts.parameter))
        throw FieldError("sweep.parameter", "'" + opts.parameter + "' is not one of sigma, sigma_p, separation, delta");
    if (opts.workers < 1) throw FieldError("workers", "must be at least 1");
    validate(base);

    fs::create_directories(opts.directory);
    Journal journal(opts.directory / "journal.tsv", fingerprint(template_text(base, opts.parameter)));
    const auto done = journal.load();
    journal.open_for_append();

    SweepOutcome outcome;
    outcome.rows.resize(opts.values.size());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < opts.values.size(); ++i) {
        auto it = done.find({i, format_double(opts.values[i])});
        if (it != done.end()) {
            outcome.rows[i] = parse_row(it->second);
            ++outcome.resumed;
        } else {
            todo.push_back(i);
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < todo.size(); k = next++) {
            const std::size_t i = todo[k];
            SweepRow row;
            row.index = i;
            row.value = opts.values[i];
            try {
                RunConfig point = apply_sweep_value(base, opts.parameter, row.value);
                point.integrator.workers = 1;
                const RunSummary s = simulate(point);
                row.ok = true;
                row.coupling = s.coupling.g;
                row.report = s.report;
            } catch (...) {
                const ErrorInfo e = classify_current_exception();
                row.ok = false;
                row.error = e.kind + ": " + e.message;
            }
            if (row.ok) journal.append(format_sweep_row(row));
            outcome.rows[i] = std::move(row);
        }
    };
    const int n_threads = std::min<int>(opts.workers, static_cast<int>(std::max<std::size_t>(todo.size(), 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string table = "# sweep over " + opts.parameter + "; units gamma = v_g = 1; probabilities dimensionless\n" +
                        sweep_table_header(opts.parameter);
    for (const auto& r : outcome.rows) {
        table += format_sweep_row(r) + "\n";
        if (!r.ok) ++outcome.failed;
    }
    write_file_atomic(opts.directory / "sweep.tsv", table);
    return outcome;
}

int sweep_command(const RunConfig& base, const SweepOptions& opts, std::ostream& log, std::ostream& err) {
    try {
        const SweepOutcome o = sweep(base, opts);
        log << "sweep over " << opts.parameter << ": " << o.rows.size() << " rows (" << o.resumed << " resumed, "
            << o.failed << " failed) -> " << (opts.directory / "sweep.tsv").string() << "\n";
        for (const auto& r : o.rows)
            if (!r.ok) err << "row " << r.index << " (" << opts.parameter << " = " << format_double(r.value)
                           << "): " << r.error << "\n";
        return o.failed ? kExitPartialSweep : kExitSuccess;
    } catch (...) {
        const ErrorInfo e = classify_current_exception();
        write_error_record(opts.directory, e);
        err << "error (" << e.kind << "): " << e.message << "\n";
        return e.exit_code;
    }
}

}  // namespace wgscatter
