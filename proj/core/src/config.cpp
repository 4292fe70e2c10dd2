#include "wgscatter/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "wgscatter/errors.hpp"

namespace wgscatter {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string to_string(InputKind k) {
    switch (k) {
        case InputKind::TwoPhoton: return "two_photon";
        case InputKind::SinglePhoton: return "single_photon";
        case InputKind::ExcitedEmitter: return "excited_emitter";
    }
    return "?";
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    int line = 0;  // 0: command-line override
    bool used = false;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"physics", {"gamma", "group_velocity", "k0", "coupling"}},
        {"grid", {"kappa_max", "dk", "n_per_branch"}},
        {"input", {"kind", "sigma_p", "sigma_p_relative"}},
        {"pulse1", {"sigma", "z0", "delta", "direction", "allow_outgoing_start"}},
        {"pulse2", {"sigma", "z0", "delta", "direction", "allow_outgoing_start"}},
        {"integrator", {"dt", "t_end", "checkpoints", "observable_stride", "workers"}},
        {"output",
         {"directory", "series", "density", "density_binary", "density_interval", "snapshots", "report", "z_min",
          "z_max", "n_z", "include_cross_branch"}},
        {"sweep", {"parameter", "values"}},
    };
    return s;
}

[[noreturn]] void bad_value(const std::string& field, const Entry& e, const std::string& what) {
    if (e.line > 0) throw ParseError(e.line, field + ": " + what + ", got '" + e.value + "'");
    throw FieldError(field, what + ", got '" + e.value + "' (override)");
}

class Reader {
public:
    explicit Reader(std::map<std::string, Section> data) : data_(std::move(data)) {}

    const Entry* find(const std::string& sec, const std::string& key) {
        auto s = data_.find(sec);
        if (s == data_.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }

    static double number(const std::string& field, const Entry& e) {
        const std::string_view v = e.value;
        if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
        if (v == "-inf") return -std::numeric_limits<double>::infinity();
        double x = 0.0;
        const char* first = v.data();
        if (!v.empty() && v.front() == '+') ++first;
        const auto res = std::from_chars(first, v.data() + v.size(), x);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || v.empty())
            bad_value(field, e, "expected a number");
        return x;
    }

    void read(const std::string& sec, const std::string& key, double& out) {
        if (const Entry* e = find(sec, key)) out = number(sec + "." + key, *e);
    }

    // "auto" (or absent) leaves the optional empty; `none_word` is an alias.
    void read(const std::string& sec, const std::string& key, std::optional<double>& out,
              std::string_view none_word = "auto") {
        const Entry* e = find(sec, key);
        if (!e) return;
        if (e->value == "auto" || e->value == none_word)
            out.reset();
        else
            out = number(sec + "." + key, *e);
    }

    void read(const std::string& sec, const std::string& key, std::size_t& out) {
        if (const Entry* e = find(sec, key)) out = count(sec + "." + key, *e);
    }

    void read(const std::string& sec, const std::string& key, std::optional<std::size_t>& out) {
        const Entry* e = find(sec, key);
        if (!e) return;
        if (e->value == "auto")
            out.reset();
        else
            out = count(sec + "." + key, *e);
    }

    void read(const std::string& sec, const std::string& key, int& out) {
        if (const Entry* e = find(sec, key)) {
            const std::size_t n = count(sec + "." + key, *e);
            if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
                bad_value(sec + "." + key, *e, "value out of range");
            out = static_cast<int>(n);
        }
    }

    void read(const std::string& sec, const std::string& key, bool& out) {
        const Entry* e = find(sec, key);
        if (!e) return;
        const std::string& v = e->value;
        if (v == "true" || v == "yes" || v == "on" || v == "1")
            out = true;
        else if (v == "false" || v == "no" || v == "off" || v == "0")
            out = false;
        else
            bad_value(sec + "." + key, *e, "expected true or false");
    }

    void read(const std::string& sec, const std::string& key, std::string& out) {
        if (const Entry* e = find(sec, key)) out = e->value;
    }

    void read(const std::string& sec, const std::string& key, std::vector<double>& out) {
        const Entry* e = find(sec, key);
        if (!e) return;
        out.clear();
        std::string_view rest = e->value;
        if (trim(rest).empty()) return;
        while (true) {
            const auto comma = rest.find(',');
            Entry item = *e;
            item.value = std::string(trim(rest.substr(0, comma)));
            out.push_back(number(sec + "." + key, item));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }

    void read(const std::string& sec, const std::string& key, Branch& out) {
        const Entry* e = find(sec, key);
        if (!e) return;
        if (e->value == "right")
            out = Branch::RightGoing;
        else if (e->value == "left")
            out = Branch::LeftGoing;
        else
            bad_value(sec + "." + key, *e, "expected right or left");
    }

    void read(const std::string& sec, const std::string& key, InputKind& out) {
        const Entry* e = find(sec, key);
        if (!e) return;
        for (InputKind k : {InputKind::TwoPhoton, InputKind::SinglePhoton, InputKind::ExcitedEmitter})
            if (e->value == to_string(k)) {
                out = k;
                return;
            }
        bad_value(sec + "." + key, *e, "expected two_photon, single_photon or excited_emitter");
    }

    void read(const std::string& sec, const std::string& key, CouplingSpec& out) {
        const Entry* e = find(sec, key);
        if (!e) return;
        const std::string& v = e->value;
        if (v == "calibrate") {
            out = {};
        } else if (v == "analytic") {
            out = {CouplingSpec::Mode::Analytic, 0.0, {}};
        } else if (v.rfind("record:", 0) == 0) {
            out = {CouplingSpec::Mode::Record, 0.0, std::string(trim(std::string_view(v).substr(7)))};
            if (out.record.empty()) bad_value(sec + "." + key, *e, "record: needs a path");
        } else {
            Entry num = *e;
            if (num.value.empty()) bad_value(sec + "." + key, *e, "expected calibrate, analytic, record:<path> or a number");
            out = {CouplingSpec::Mode::Fixed, number(sec + "." + key, num), {}};
        }
    }

    // Keys present but never consumed are rejected.
    void reject_unused() const {
        for (const auto& [sec, keys] : data_)
            for (const auto& [key, e] : keys)
                if (!e.used) {
                    if (e.line > 0) throw ParseError(e.line, "unknown key '" + key + "' in [" + sec + "]");
                    throw FieldError(sec + "." + key, "unknown key (override)");
                }
    }

private:
    static std::size_t count(const std::string& field, const Entry& e) {
        std::size_t n = 0;
        const std::string_view v = e.value;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), n);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || v.empty())
            bad_value(field, e, "expected a non-negative integer");
        return n;
    }

    std::map<std::string, Section> data_;
};

std::map<std::string, Section> tokenize(std::string_view text) {
    std::map<std::string, Section> data;
    std::string current;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (!schema().count(current)) throw ParseError(line_no, "unknown section [" + current + "]");
            data[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        if (current.empty()) throw ParseError(line_no, "key outside of any section");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (!schema().at(current).count(key))
            throw ParseError(line_no, "unknown key '" + key + "' in [" + current + "]");
        auto [it, inserted] = data[current].try_emplace(key);
        if (!inserted)
            throw ParseError(line_no, "duplicate key '" + key + "' (first on line " +
                                          std::to_string(it->second.line) + ")");
        it->second.value = std::string(trim(line.substr(eq + 1)));
        it->second.line = line_no;
    }
    return data;
}

void read_pulse(Reader& r, const std::string& sec, PulseSection& p) {
    r.read(sec, "sigma", p.sigma);
    r.read(sec, "z0", p.z0);
    r.read(sec, "delta", p.delta);
    r.read(sec, "direction", p.direction);
    r.read(sec, "allow_outgoing_start", p.allow_outgoing_start);
}

std::string opt(const std::optional<double>& v, const char* none = "auto") {
    return v ? format_double(*v) : none;
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw FieldError(field, what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

PulseSpec pulse_spec(const PulseSection& p) {
    PulseSpec s;
    s.sigma = p.sigma;
    s.delta = p.delta;
    s.direction = p.direction;
    s.allow_outgoing_start = p.allow_outgoing_start;
    s.z0 = p.z0 ? *p.z0 : -propagation_sign(p.direction) * auto_start_distance(p.sigma);
    return s;
}

}  // namespace

std::pair<std::string, std::string> parse_override(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(text) + "' lacks '='");
    const std::string name(trim(text.substr(0, eq)));
    if (name.find('.') == std::string::npos || name.front() == '.' || name.back() == '.')
        throw ConfigError("override '" + std::string(text) + "' must look like section.key=value");
    return {name, std::string(trim(text.substr(eq + 1)))};
}

RunConfig parse_config(std::string_view text, const Overrides& overrides) {
    auto data = tokenize(text);
    for (const auto& [name, value] : overrides) {
        const auto dot = name.find('.');
        const std::string sec = name.substr(0, dot), key = name.substr(dot + 1);
        const auto s = schema().find(sec);
        if (s == schema().end()) throw FieldError(name, "unknown section (override)");
        if (!s->second.count(key)) throw FieldError(name, "unknown key (override)");
        data[sec][key] = Entry{value, 0, false};
    }

    Reader r(std::move(data));
    RunConfig c;
    r.read("physics", "gamma", c.physics.gamma);
    r.read("physics", "group_velocity", c.physics.group_velocity);
    r.read("physics", "k0", c.physics.k0, "none");
    r.read("physics", "coupling", c.physics.coupling);

    r.read("grid", "kappa_max", c.grid.kappa_max);
    r.read("grid", "dk", c.grid.dk);
    r.read("grid", "n_per_branch", c.grid.n_per_branch);

    r.read("input", "kind", c.input.kind);
    r.read("input", "sigma_p", c.input.sigma_p, "inf");
    r.read("input", "sigma_p_relative", c.input.sigma_p_relative, "none");
    if (c.input.sigma_p && std::isinf(*c.input.sigma_p) && *c.input.sigma_p > 0) c.input.sigma_p.reset();
    read_pulse(r, "pulse1", c.input.pulse1);
    read_pulse(r, "pulse2", c.input.pulse2);

    r.read("integrator", "dt", c.integrator.dt);
    r.read("integrator", "t_end", c.integrator.t_end);
    r.read("integrator", "checkpoints", c.integrator.checkpoints);
    r.read("integrator", "observable_stride", c.integrator.observable_stride);
    r.read("integrator", "workers", c.integrator.workers);

    auto& o = c.output;
    r.read("output", "directory", o.directory);
    r.read("output", "series", o.series);
    r.read("output", "density", o.density);
    r.read("output", "density_binary", o.density_binary);
    r.read("output", "density_interval", o.density_interval);
    r.read("output", "snapshots", o.snapshots);
    r.read("output", "report", o.report);
    r.read("output", "z_min", o.z_min);
    r.read("output", "z_max", o.z_max);
    r.read("output", "n_z", o.n_z);
    r.read("output", "include_cross_branch", o.include_cross_branch);

    r.read("sweep", "parameter", c.sweep.parameter);
    r.read("sweep", "values", c.sweep.values);

    r.reject_unused();
    validate(c);
    (void)resolve(c);
    return c;
}

RunConfig load_config(const std::string& path, const Overrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string serialize(const RunConfig& c) {
    std::ostringstream os;
    auto b = [](bool v) { return v ? "true" : "false"; };
    auto dir = [](Branch br) { return br == Branch::RightGoing ? "right" : "left"; };

    os << "[physics]\n"
       << "gamma = " << format_double(c.physics.gamma) << "\n"
       << "group_velocity = " << format_double(c.physics.group_velocity) << "\n"
       << "k0 = " << opt(c.physics.k0, "none") << "\n"
       << "coupling = ";
    switch (c.physics.coupling.mode) {
        case CouplingSpec::Mode::Calibrate: os << "calibrate"; break;
        case CouplingSpec::Mode::Analytic: os << "analytic"; break;
        case CouplingSpec::Mode::Fixed: os << format_double(c.physics.coupling.value); break;
        case CouplingSpec::Mode::Record: os << "record:" << c.physics.coupling.record; break;
    }
    os << "\n\n[grid]\n"
       << "kappa_max = " << opt(c.grid.kappa_max) << "\n"
       << "dk = " << opt(c.grid.dk) << "\n"
       << "n_per_branch = " << (c.grid.n_per_branch ? std::to_string(*c.grid.n_per_branch) : "auto") << "\n";

    os << "\n[input]\n"
       << "kind = " << to_string(c.input.kind) << "\n"
       << "sigma_p = " << opt(c.input.sigma_p, "inf") << "\n"
       << "sigma_p_relative = " << opt(c.input.sigma_p_relative, "none") << "\n";
    for (const auto& [name, p] : {std::pair{"pulse1", &c.input.pulse1}, std::pair{"pulse2", &c.input.pulse2}}) {
        os << "\n[" << name << "]\n"
           << "sigma = " << format_double(p->sigma) << "\n"
           << "z0 = " << opt(p->z0) << "\n"
           << "delta = " << format_double(p->delta) << "\n"
           << "direction = " << dir(p->direction) << "\n"
           << "allow_outgoing_start = " << b(p->allow_outgoing_start) << "\n";
    }

    os << "\n[integrator]\n"
       << "dt = " << opt(c.integrator.dt) << "\n"
       << "t_end = " << opt(c.integrator.t_end) << "\n"
       << "checkpoints = ";
    for (std::size_t i = 0; i < c.integrator.checkpoints.size(); ++i)
        os << (i ? ", " : "") << format_double(c.integrator.checkpoints[i]);
    os << "\n"
       << "observable_stride = " << c.integrator.observable_stride << "\n"
       << "workers = " << c.integrator.workers << "\n";

    const auto& o = c.output;
    os << "\n[output]\n"
       << "directory = " << o.directory << "\n"
       << "series = " << b(o.series) << "\n"
       << "density = " << b(o.density) << "\n"
       << "density_binary = " << b(o.density_binary) << "\n"
       << "density_interval = " << format_double(o.density_interval) << "\n"
       << "snapshots = " << b(o.snapshots) << "\n"
       << "report = " << b(o.report) << "\n"
       << "z_min = " << format_double(o.z_min) << "\n"
       << "z_max = " << format_double(o.z_max) << "\n"
       << "n_z = " << o.n_z << "\n"
       << "include_cross_branch = " << b(o.include_cross_branch) << "\n";

    os << "\n[sweep]\n"
       << "parameter = " << c.sweep.parameter << "\n"
       << "values = ";
    for (std::size_t i = 0; i < c.sweep.values.size(); ++i) os << (i ? ", " : "") << format_double(c.sweep.values[i]);
    os << "\n";
    return os.str();
}

void validate(const RunConfig& c) {
    require(positive_finite(c.physics.gamma), "physics.gamma", "must be positive and finite");
    require(positive_finite(c.physics.group_velocity), "physics.group_velocity", "must be positive and finite");
    if (c.physics.k0) require(std::isfinite(*c.physics.k0), "physics.k0", "must be finite");
    if (c.physics.coupling.mode == CouplingSpec::Mode::Fixed)
        require(std::isfinite(c.physics.coupling.value) && c.physics.coupling.value >= 0.0, "physics.coupling",
                "must be non-negative and finite");

    if (c.grid.kappa_max) require(positive_finite(*c.grid.kappa_max), "grid.kappa_max", "must be positive");
    if (c.grid.dk) require(positive_finite(*c.grid.dk), "grid.dk", "must be positive");
    if (c.grid.n_per_branch) require(*c.grid.n_per_branch >= 2, "grid.n_per_branch", "must be at least 2");
    require(!(c.grid.dk && c.grid.n_per_branch), "grid.n_per_branch", "give either dk or n_per_branch, not both");

    if (c.input.sigma_p) require(positive_finite(*c.input.sigma_p), "input.sigma_p", "must be positive or inf");
    if (c.input.sigma_p_relative) {
        require(positive_finite(*c.input.sigma_p_relative), "input.sigma_p_relative", "must be positive");
        require(!c.input.sigma_p, "input.sigma_p_relative", "conflicts with a finite input.sigma_p");
    }
    for (const auto& [name, p] : {std::pair{"pulse1", &c.input.pulse1}, std::pair{"pulse2", &c.input.pulse2}}) {
        const std::string pre = name;
        require(positive_finite(p->sigma), pre + ".sigma", "must be positive and finite");
        require(std::isfinite(p->delta), pre + ".delta", "must be finite");
        if (p->z0) require(std::isfinite(*p->z0), pre + ".z0", "must be finite");
    }

    if (c.integrator.dt) require(positive_finite(*c.integrator.dt), "integrator.dt", "must be positive");
    if (c.integrator.t_end) require(positive_finite(*c.integrator.t_end), "integrator.t_end", "must be positive");
    require(c.integrator.observable_stride >= 1, "integrator.observable_stride", "must be at least 1");
    require(c.integrator.workers >= 1, "integrator.workers", "must be at least 1");

    require(!c.output.directory.empty(), "output.directory", "must not be empty");
    require(positive_finite(c.output.density_interval), "output.density_interval", "must be positive");

    if (!c.sweep.parameter.empty())
        require(is_sweepable(c.sweep.parameter), "sweep.parameter",
                "'" + c.sweep.parameter + "' is not one of sigma, sigma_p, separation, delta");
}

ResolvedRun resolve(const RunConfig& c) {
    validate(c);
    ResolvedRun r;
    r.kind = c.input.kind;
    r.params.gamma = c.physics.gamma;
    r.params.group_velocity = c.physics.group_velocity;
    r.params.k0 = c.physics.k0;
    r.params.coupling = c.physics.coupling.mode == CouplingSpec::Mode::Fixed ? c.physics.coupling.value : 0.0;
    r.params.validate();

    std::vector<PulseSpec> pulses;
    if (r.kind != InputKind::ExcitedEmitter) pulses.push_back(pulse_spec(c.input.pulse1));
    if (r.kind == InputKind::TwoPhoton) pulses.push_back(pulse_spec(c.input.pulse2));
    r.input.pulse1 = pulse_spec(c.input.pulse1);
    r.input.pulse2 = pulse_spec(c.input.pulse2);
    if (c.input.sigma_p)
        r.input.sigma_p = CorrelationWidth::finite(*c.input.sigma_p);
    else if (c.input.sigma_p_relative)
        r.input.sigma_p = CorrelationWidth::finite(*c.input.sigma_p_relative * c.input.pulse1.sigma);
    r.input.pulse1.validate("pulse1");
    if (r.kind == InputKind::TwoPhoton) r.input.pulse2.validate("pulse2");

    const double vg = r.params.group_velocity;
    const double line = r.params.gamma / vg;

    // Duration: the farthest pulse arrives, passes, and the emitter rings down.
    double t_end = 12.0 / r.params.gamma;
    for (const auto& p : pulses)
        t_end = std::max(t_end, auto_end_time(std::abs(p.z0), p.sigma, r.params.gamma, vg));
    if (c.integrator.t_end) t_end = *c.integrator.t_end;

    // Window: all pulse spectra with margin, and several linewidths.
    double kmax = 10.0 * line;
    for (const auto& p : pulses) kmax = std::max(kmax, 6.0 * p.sigma + std::abs(p.carrier_kappa(r.params)));
    if (c.grid.kappa_max) kmax = *c.grid.kappa_max;

    double dk = std::clamp(kmax / 200.0, 0.05 * line, 0.1 * line);
    for (const auto& p : pulses) {
        dk = std::min(dk, 0.5 * p.sigma);
        const double room = required_recurrence_length(t_end, std::abs(p.z0), p.sigma, vg);
        dk = std::min(dk, 2.0 * std::numbers::pi / room);
    }
    std::size_t n = 0;
    if (c.grid.n_per_branch) {
        n = *c.grid.n_per_branch;
    } else {
        if (c.grid.dk) dk = *c.grid.dk;
        n = static_cast<std::size_t>(std::ceil(2.0 * kmax / dk * (1.0 - 1e-12))) + 1;
    }
    r.grid = Grid::build(n, kmax);

    r.integrator.t_end = t_end;
    r.integrator.dt = c.integrator.dt ? *c.integrator.dt : default_time_step(r.grid, r.params);
    r.integrator.checkpoint_times = c.integrator.checkpoints;
    r.integrator.observable_stride = c.integrator.observable_stride;
    r.integrator.workers = c.integrator.workers;
    r.integrator.validate(r.grid, r.params);

    r.zgrid.z_min = c.output.z_min;
    r.zgrid.z_max = c.output.z_max;
    r.zgrid.n_z = c.output.n_z;
    r.zgrid.include_cross_branch = c.output.include_cross_branch;
    r.zgrid.k0 = c.physics.k0.value_or(0.0);
    try {
        r.zgrid.validate();
    } catch (const ConfigError& e) {
        throw FieldError("output.z_grid", e.what());
    }
    if (c.output.include_cross_branch && !c.physics.k0)
        throw FieldError("output.include_cross_branch", "needs physics.k0");
    return r;
}

bool is_sweepable(const std::string& parameter) {
    return parameter == "sigma" || parameter == "sigma_p" || parameter == "separation" || parameter == "delta";
}

RunConfig apply_sweep_value(const RunConfig& base, const std::string& parameter, double value) {
    RunConfig c = base;
    auto& p1 = c.input.pulse1;
    auto& p2 = c.input.pulse2;
    if (parameter == "sigma") {
        p1.sigma = value;
        p2.sigma = value;
    } else if (parameter == "sigma_p") {
        c.input.sigma_p_relative.reset();
        if (std::isinf(value) && value > 0)
            c.input.sigma_p.reset();
        else
            c.input.sigma_p = value;
    } else if (parameter == "separation") {
        if (p1.direction == p2.direction) {
            const double z1 = pulse_spec(p1).z0;
            p1.z0 = z1;
            p2.z0 = z1 - propagation_sign(p1.direction) * value;
        } else {
            const double s1 = propagation_sign(p1.direction);
            p1.z0 = -s1 * 0.5 * value;
            p2.z0 = s1 * 0.5 * value;
        }
    } else if (parameter == "delta") {
        p1.delta = value;
        p2.delta = value;
    } else {
        throw FieldError("sweep.parameter", "'" + parameter + "' is not one of sigma, sigma_p, separation, delta");
    }
    return c;
}

}  // namespace wgscatter
