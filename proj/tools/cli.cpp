#include "cli.hpp"

#include "t1echo/t1echo.h"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

namespace t1cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kExperiments{"derive", "trajectory", "decay", "pulse-loss",
                                            "tomography"};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    }
    return out;
}

void require_one_of(const std::string& key, const std::string& value,
                    const std::vector<std::string>& allowed) {
    for (const auto& a : allowed) {
        if (value == a) {
            return;
        }
    }
    std::string list;
    for (const auto& a : allowed) {
        list += (list.empty() ? "" : ", ") + a;
    }
    throw ConfigError(key, "'" + value + "' is not one of " + list);
}

void require_finite(const std::string& key, double v) {
    if (!std::isfinite(v)) {
        throw ConfigError(key, "must be finite");
    }
}

void require_rate(const std::string& key, double v) {
    require_finite(key, v);
    if (v < 0.0) {
        throw ConfigError(key, "must be >= 0");
    }
}

// Throws on a failed C call.
void check(t1e_status s) {
    if (s != T1E_OK) {
        throw std::runtime_error(std::string(t1e_status_string(s)) + ": " +
                                 t1e_last_error_message());
    }
}

struct SystemHandle {
    t1e_system* ptr = nullptr;
    SystemHandle() = default;
    SystemHandle(const SystemHandle&) = delete;
    SystemHandle& operator=(const SystemHandle&) = delete;
    ~SystemHandle() { t1e_system_destroy(ptr); }
};

t1e_noise noise_of(const Config& c) {
    return {c.gamma1_q, c.gamma1_m, c.gammaphi_q, c.gammaphi_m};
}

void make_system(const Config& c, double delta_omega, SystemHandle& h, std::ostream& diag) {
    t1e_params p;
    t1e_params_init(&p);
    p.v_perp = c.v_perp;
    p.delta_omega = delta_omega;
    p.clamp_factor = c.clamp_factor;
    p.has_epsilon = c.epsilon.has_value() ? 1 : 0;
    p.epsilon = c.epsilon.value_or(0.0);
    const t1e_noise n = noise_of(c);
    check(t1e_system_create(&p, &n, c.model == "lindblad" ? T1E_MODEL_LINDBLAD : T1E_MODEL_SECULAR,
                            &h.ptr));
    for (size_t i = 0; i < t1e_system_warning_count(h.ptr); ++i) {
        diag << "warning: " << t1e_system_warning(h.ptr, i) << "\n";
    }
}

t1e_sequence sequence_of(const Config& c) {
    t1e_sequence s;
    t1e_sequence_init(&s);
    s.pulses = c.pulses == "none"          ? T1E_PULSES_NONE
               : c.pulses == "hamiltonian" ? T1E_PULSES_HAMILTONIAN
                                           : T1E_PULSES_IDEAL;
    s.recovery = c.recovery ? 1 : 0;
    s.clamped = c.clamped == "ideal-z" ? T1E_CLAMPED_IDEAL_Z : T1E_CLAMPED_DETUNING;
    return s;
}

std::vector<double> panels(const Config& c) {
    return c.delta_omegas.empty() ? std::vector<double>{c.delta_omega} : c.delta_omegas;
}

Table run_derive(const Config& c, std::ostream& diag) {
    SystemHandle h;
    make_system(c, c.delta_omega, h, diag);
    t1e_derived d;
    check(t1e_system_derive(h.ptr, &d));
    Table t;
    t.columns = {"omega0", "xi0",    "delta_omega_1", "xi1",           "omega1",
                 "t_pi",   "t_swap", "gamma_plus",    "clamp_engaged", "pulse_to_swap_ratio"};
    t.rows.push_back({d.omega0, d.xi0, d.delta_omega_1, d.xi1, d.omega1, d.t_pi, d.t_swap,
                      d.gamma_plus, d.clamp_engaged ? 1.0 : 0.0, d.t_pi / d.t_swap});
    return t;
}

Table run_trajectory(const Config& c, std::ostream& diag) {
    SystemHandle h;
    make_system(c, c.delta_omega, h, diag);
    const t1e_sequence seq = sequence_of(c);
    t1e_trajectory* traj = nullptr;
    check(t1e_trajectory_compute(h.ptr, &seq, *c.free_time, c.sample_dt, &traj));
    std::unique_ptr<t1e_trajectory, void (*)(t1e_trajectory*)> guard(traj, t1e_trajectory_destroy);
    Table t;
    t.columns = {"time", "x", "y", "z", "p_excited_qubit"};
    const size_t n = t1e_trajectory_size(traj);
    for (size_t i = 0; i < n; ++i) {
        t1e_trajectory_point p;
        check(t1e_trajectory_point_at(traj, i, &p));
        t.rows.push_back({p.time, p.x, p.y, p.z, p.p_excited_qubit});
    }
    return t;
}

Table run_decay(const Config& c, std::ostream& diag) {
    const auto grid = linspace(0.0, c.t_max, c.points);
    const double gp = 0.5 * (c.gamma1_q + c.gamma1_m);
    Table t;
    t.columns = {"time_or_detuning",        "p1q_simulated",   "p1q_reference_qubit",
                 "p1q_reference_gammaplus", "p1q_no_sequence", "delta_omega",
                 "free_time"};
    for (double dw : panels(c)) {
        SystemHandle h;
        make_system(c, dw, h, diag);
        const t1e_sequence seq = sequence_of(c);
        std::vector<t1e_decay_point> with(grid.size());
        check(t1e_decay_curve(h.ptr, &seq, grid.data(), grid.size(), with.data()));

        // the bare curve is sampled at the same elapsed times
        std::vector<double> elapsed(grid.size());
        for (size_t i = 0; i < grid.size(); ++i) {
            elapsed[i] = with[i].time;
        }
        t1e_sequence bare = seq;
        bare.pulses = T1E_PULSES_NONE;
        std::vector<t1e_decay_point> without(grid.size());
        check(t1e_decay_curve(h.ptr, &bare, elapsed.data(), elapsed.size(), without.data()));

        for (size_t i = 0; i < grid.size(); ++i) {
            const double time = with[i].time;
            t.rows.push_back({time, with[i].p1q, std::exp(-c.gamma1_q * time),
                              std::exp(-gp * time), without[i].p1q, dw, with[i].free_time});
        }
    }
    return t;
}

Table run_pulse_loss(const Config& c, std::ostream& diag) {
    SystemHandle h;
    make_system(c, c.delta_omega, h, diag);
    const auto grid = panels(c);
    std::vector<t1e_pulse_loss_point> pts(grid.size());
    const auto clamped = c.clamped == "ideal-z" ? T1E_CLAMPED_IDEAL_Z : T1E_CLAMPED_DETUNING;
    check(t1e_pulse_loss_curve(h.ptr, clamped, grid.data(), grid.size(), pts.data()));
    Table t;
    t.columns = {"time_or_detuning", "p1q_simulated", "p1q_reference_qubit",
                 "p1q_reference_gammaplus", "t_pi"};
    for (const auto& p : pts) {
        t.rows.push_back({p.delta_omega, p.p1q, p.reference_qubit, p.reference_gamma_plus, p.t_pi});
    }
    return t;
}

json chi_json(const t1e_chi& chi) {
    json rows = json::array();
    for (int m = 0; m < 4; ++m) {
        json row = json::array();
        for (int n = 0; n < 4; ++n) {
            row.push_back({chi.re[4 * m + n], chi.im[4 * m + n]});
        }
        rows.push_back(row);
    }
    return rows;
}

Table run_tomography(const Config& c, std::ostream& diag) {
    SystemHandle h;
    make_system(c, c.delta_omega, h, diag);
    const t1e_sequence seq = sequence_of(c);
    const double eps = c.epsilon.value_or(0.0);
    t1e_chi rec;
    t1e_chi ana;
    check(t1e_chi_reconstruct(h.ptr, &seq, *c.free_time, eps, &rec));
    check(t1e_chi_analytic(0.5 * (c.gamma1_q + c.gamma1_m), eps, *c.free_time, &ana));
    t1e_chi_check chk;
    check(t1e_chi_validate(&rec, &chk));
    double fidelity = 0.0;
    check(t1e_process_fidelity(&rec, &ana, &fidelity));

    Table t;
    t.columns = {"row", "col", "re", "im", "analytic_re", "analytic_im"};
    for (int i = 0; i < 16; ++i) {
        t.rows.push_back({double(i / 4), double(i % 4), rec.re[i], rec.im[i], ana.re[i], ana.im[i]});
    }
    t.extra["basis"] = {"I", "X", "Y", "Z"};
    t.extra["chi"] = chi_json(rec);
    t.extra["chi_analytic"] = chi_json(ana);
    t.extra["process_fidelity"] = fidelity;
    t.extra["checks"] = {{"hermiticity_error", chk.hermiticity_error},
                         {"min_diagonal", chk.min_diagonal},
                         {"diagonal_sum_error", chk.diagonal_sum_error},
                         {"trace_condition_error", chk.trace_condition_error}};
    return t;
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig2", "fig3", "fig5", "fig6", "fig7"};
    return names;
}

Config preset(const std::string& name) {
    using std::numbers::pi;
    Config c;
    c.preset = name;
    if (name == "fig2") {
        c.experiment = "trajectory";
        c.delta_omega = 0.0;
        c.recovery = false;
        c.free_time = 2 * pi / (3 * 5.0);
        c.sample_dt = 0.005;
    } else if (name == "fig3") {
        c.experiment = "trajectory";
        c.delta_omega = -5.0;
        c.free_time = 2 * pi / std::hypot(5.0, 5.0);
        c.sample_dt = 0.005;
    } else if (name == "fig5") {
        c.experiment = "decay";
        c.model = "secular";
        c.pulses = "ideal";
        c.delta_omegas = {0.0, 5.0, 15.0};
        c.t_max = 4.0;
        c.points = 401;
    } else if (name == "fig6") {
        c.experiment = "decay";
        c.model = "lindblad";
        c.pulses = "hamiltonian";
        c.gammaphi_q = 0.5;
        c.delta_omegas = {0.0, 1.0, 2.0};
        c.t_max = 5.0;
        c.points = 1001;
    } else if (name == "fig7") {
        c.experiment = "pulse-loss";
        c.model = "secular";
        c.pulses = "hamiltonian";
        c.gammaphi_q = 0.5;
        c.delta_omegas = linspace(0.0, 20.0, 201);
    } else {
        throw ConfigError("preset", "unknown preset '" + name + "'");
    }
    return c;
}

json to_json(const Config& c) {
    json j;
    j["experiment"] = c.experiment;
    j["preset"] = c.preset;
    j["v_perp"] = c.v_perp;
    j["delta_omega"] = c.delta_omega;
    j["delta_omegas"] = c.delta_omegas;
    j["clamp_factor"] = c.clamp_factor;
    j["epsilon"] = c.epsilon ? json(*c.epsilon) : json(nullptr);
    j["gamma1_q"] = c.gamma1_q;
    j["gamma1_m"] = c.gamma1_m;
    j["gammaphi_q"] = c.gammaphi_q;
    j["gammaphi_m"] = c.gammaphi_m;
    j["model"] = c.model;
    j["pulses"] = c.pulses;
    j["recovery"] = c.recovery;
    j["clamped"] = c.clamped;
    j["t_max"] = c.t_max;
    j["points"] = c.points;
    j["free_time"] = c.free_time ? json(*c.free_time) : json(nullptr);
    j["sample_dt"] = c.sample_dt;
    j["output"] = c.output;
    j["format"] = c.format;
    return j;
}

Config apply_json(Config c, const json& j) {
    if (!j.is_object()) {
        throw ConfigError("config", "must be a JSON object");
    }
    using Setter = std::function<void(Config&, const json&)>;
    auto optional = [](std::optional<double> Config::*m) -> Setter {
        return [m](Config& c, const json& v) {
            c.*m = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
        };
    };
    auto plain = [](auto Config::*m) -> Setter {
        return [m](Config& c, const json& v) { v.get_to(c.*m); };
    };
    static const std::map<std::string, Setter> setters{
        {"experiment", plain(&Config::experiment)},
        {"preset", plain(&Config::preset)},
        {"v_perp", plain(&Config::v_perp)},
        {"delta_omega", plain(&Config::delta_omega)},
        {"delta_omegas", plain(&Config::delta_omegas)},
        {"clamp_factor", plain(&Config::clamp_factor)},
        {"epsilon", optional(&Config::epsilon)},
        {"gamma1_q", plain(&Config::gamma1_q)},
        {"gamma1_m", plain(&Config::gamma1_m)},
        {"gammaphi_q", plain(&Config::gammaphi_q)},
        {"gammaphi_m", plain(&Config::gammaphi_m)},
        {"model", plain(&Config::model)},
        {"pulses", plain(&Config::pulses)},
        {"recovery", plain(&Config::recovery)},
        {"clamped", plain(&Config::clamped)},
        {"t_max", plain(&Config::t_max)},
        {"points", plain(&Config::points)},
        {"free_time", optional(&Config::free_time)},
        {"sample_dt", plain(&Config::sample_dt)},
        {"output", plain(&Config::output)},
        {"format", plain(&Config::format)},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError(key, "unknown key");
        }
        try {
            it->second(c, value);
        } catch (const json::exception& e) {
            throw ConfigError(key, std::string("wrong type (") + value.type_name() + ")");
        }
    }
    return c;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open '" + path + "'");
    }
    std::string first;
    std::getline(in, first);
    const std::string tag = "# config: ";
    json j;
    try {
        if (first.rfind(tag, 0) == 0) {
            j = json::parse(first.substr(tag.size()));
        } else {
            std::stringstream rest;
            rest << first << "\n" << in.rdbuf();
            j = json::parse(rest.str());
        }
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("cannot parse '") + path + "': " + e.what());
    }
    // an output file carries its config under "config"
    if (j.is_object() && j.contains("config") && j.contains("columns")) {
        return j["config"];
    }
    return j;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    auto number = [&](const std::string& s) {
        double v = 0.0;
        const char* b = s.data();
        const char* e = s.data() + s.size();
        while (b < e && *b == ' ') {
            ++b;
        }
        if (b < e && *b == '+') {
            ++b;
        }
        const auto r = std::from_chars(b, e, v);
        if (r.ec != std::errc() || r.ptr != e) {
            throw ConfigError(key, "cannot read number '" + s + "'");
        }
        return v;
    };
    std::vector<std::string> parts;
    const char sep = text.find(':') != std::string::npos ? ':' : ',';
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, sep);) {
        parts.push_back(item);
    }
    if (sep == ':') {
        if (parts.size() != 3) {
            throw ConfigError(key, "range must be start:stop:count");
        }
        const double n = number(parts[2]);
        if (n < 1 || n != std::floor(n)) {
            throw ConfigError(key, "range count must be a positive integer");
        }
        return linspace(number(parts[0]), number(parts[1]), static_cast<int>(n));
    }
    std::vector<double> out;
    for (const auto& p : parts) {
        out.push_back(number(p));
    }
    return out;
}

Config resolve(Config c) {
    require_one_of("experiment", c.experiment, kExperiments);
    if (!c.preset.empty()) {
        preset(c.preset);  // validates the name
    }
    require_finite("v_perp", c.v_perp);
    if (c.v_perp <= 0.0) {
        throw ConfigError("v_perp", "must be > 0");
    }
    require_finite("delta_omega", c.delta_omega);
    for (double d : c.delta_omegas) {
        require_finite("delta_omegas", d);
    }
    require_finite("clamp_factor", c.clamp_factor);
    if (c.clamp_factor <= 0.0) {
        throw ConfigError("clamp_factor", "must be > 0");
    }
    if (c.epsilon) {
        require_finite("epsilon", *c.epsilon);
    }
    require_rate("gamma1_q", c.gamma1_q);
    require_rate("gamma1_m", c.gamma1_m);
    require_rate("gammaphi_q", c.gammaphi_q);
    require_rate("gammaphi_m", c.gammaphi_m);
    require_one_of("model", c.model, {"lindblad", "secular"});
    require_one_of("pulses", c.pulses, {"ideal", "hamiltonian", "none"});
    require_one_of("clamped", c.clamped, {"clamp", "ideal-z"});
    require_one_of("format", c.format, {"csv", "json"});
    require_rate("t_max", c.t_max);
    if (c.points < 1) {
        throw ConfigError("points", "must be >= 1");
    }
    require_finite("sample_dt", c.sample_dt);
    if (c.sample_dt <= 0.0) {
        throw ConfigError("sample_dt", "must be > 0");
    }
    if (!c.free_time) {
        // one vacuum-Rabi period for trajectories, unit time for tomography
        c.free_time = c.experiment == "trajectory" ? 2 * std::numbers::pi / std::hypot(c.v_perp, c.delta_omega)
                                                   : 1.0;
    }
    require_rate("free_time", *c.free_time);
    return c;
}

Table run_experiment(const Config& c, std::ostream& diag) {
    if (c.experiment == "derive") {
        return run_derive(c, diag);
    }
    if (c.experiment == "trajectory") {
        return run_trajectory(c, diag);
    }
    if (c.experiment == "decay") {
        return run_decay(c, diag);
    }
    if (c.experiment == "pulse-loss") {
        return run_pulse_loss(c, diag);
    }
    return run_tomography(c, diag);
}

std::string format_number(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string render_csv(const Config& c, const Table& t) {
    std::string s = "# config: " + to_json(c).dump() + "\n";
    for (size_t i = 0; i < t.columns.size(); ++i) {
        s += (i ? "," : "") + t.columns[i];
    }
    s += "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) {
                s += ',';
            }
            s += format_number(row[i]);
        }
        s += "\n";
    }
    return s;
}

std::string render_json(const Config& c, const Table& t) {
    json j = t.extra;
    j["config"] = to_json(c);
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    return j.dump(1) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move output into '" + path + "'");
    }
}

namespace {

// Flag storage; only flags given on the command line are applied.
struct Flags {
    std::vector<std::function<void(Config&)>> apply;
    std::string preset;
    std::string config_path;
    bool json_out = false;

    template <typename T, typename M>
    void add(CLI::App* app, const std::string& name, const std::string& desc, M Config::*member) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(name, *value, desc);
        apply.push_back([opt, value, member](Config& c) {
            if (opt->count() > 0) {
                c.*member = *value;
            }
        });
    }
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--preset", f.preset, "Named figure preset (fig2, fig3, fig5, fig6, fig7)");
    app->add_option("--config", f.config_path, "JSON config, or an earlier CSV/JSON output");
    f.add<double>(app, "--v-perp", "Qubit-memory coupling", &Config::v_perp);
    f.add<double>(app, "--delta-omega", "Qubit-memory detuning", &Config::delta_omega);
    auto list = std::make_shared<std::string>();
    CLI::Option* lo = app->add_option("--delta-omegas", *list, "Detunings: a,b,c or start:stop:count");
    f.apply.push_back([lo, list](Config& c) {
        if (lo->count() > 0) {
            c.delta_omegas = parse_list("delta_omegas", *list);
        }
    });
    f.add<double>(app, "--gamma1-q", "Qubit relaxation rate", &Config::gamma1_q);
    f.add<double>(app, "--gamma1-m", "Memory relaxation rate", &Config::gamma1_m);
    f.add<double>(app, "--gammaphi-q", "Qubit pure dephasing rate", &Config::gammaphi_q);
    f.add<double>(app, "--gammaphi-m", "Memory pure dephasing rate", &Config::gammaphi_m);
    f.add<std::string>(app, "--model", "lindblad | secular", &Config::model);
    f.add<std::string>(app, "--pulses", "ideal | hamiltonian | none", &Config::pulses);
    f.add<std::string>(app, "--clamped", "clamp | ideal-z", &Config::clamped);
    f.add<double>(app, "--t-max", "Largest free evolution time", &Config::t_max);
    f.add<int>(app, "--points", "Number of free times", &Config::points);
    f.add<double>(app, "--clamp-factor", "Pulse detuning limit in units of v_perp", &Config::clamp_factor);
    f.add<double>(app, "--time,--free-time", "Free evolution time", &Config::free_time);
    f.add<double>(app, "--sample-dt", "Trajectory sampling step", &Config::sample_dt);
    f.add<double>(app, "--epsilon", "Lab-frame qubit splitting", &Config::epsilon);
    f.add<std::string>(app, "--output,-o", "Output file (default stdout)", &Config::output);
    f.add<std::string>(app, "--format", "csv | json", &Config::format);
    auto no_recovery = std::make_shared<bool>(false);
    CLI::Option* nr = app->add_flag("--no-recovery", *no_recovery, "Omit the recovery pulse");
    f.apply.push_back([nr](Config& c) {
        if (nr->count() > 0) {
            c.recovery = false;
        }
    });
    app->add_flag("--json", f.json_out, "Print derive results as JSON");
}

Config build_config(const std::string& experiment, const Flags& f) {
    json file;
    if (!f.config_path.empty()) {
        file = load_config_file(f.config_path);
    }
    std::string preset_name = f.preset;
    if (preset_name.empty() && file.is_object() && file.contains("preset") && file["preset"].is_string()) {
        preset_name = file["preset"].get<std::string>();
    }
    Config c = preset_name.empty() ? Config{} : preset(preset_name);
    if (!file.is_null()) {
        c = apply_json(c, file);
    }
    c.preset = preset_name;
    for (const auto& a : f.apply) {
        a(c);
    }
    if (!experiment.empty()) {
        c.experiment = experiment;
    }
    return resolve(c);
}

void print_derive(const Table& t, std::ostream& out) {
    for (size_t i = 0; i < t.columns.size(); ++i) {
        out << std::left << std::setw(22) << t.columns[i] << format_number(t.rows[0][i]) << "\n";
    }
}

} // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator for the T1-echo sequence on a qubit coupled to a two-level memory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(t1e_version()));

    const std::vector<std::pair<std::string, std::string>> commands{
        {"derive", "Print derived sequence parameters"},
        {"trajectory", "Bloch-sphere path of the closed-system sequence"},
        {"decay", "Excited population versus free evolution time"},
        {"pulse-loss", "Population after only the two pulses, versus detuning"},
        {"tomography", "Process matrix of the whole sequence"},
        {"run", "Run the experiment named in --config or --preset"},
    };
    std::map<std::string, Flags> flags;
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const auto& [name, desc] : commands) {
        CLI::App* sub = app.add_subcommand(name, desc);
        add_common(sub, flags[name]);
        subs.emplace_back(name, sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    std::string name;
    for (const auto& [n, sub] : subs) {
        if (sub->parsed()) {
            name = n;
        }
    }
    const Flags& f = flags[name];

    Config c;
    try {
        c = build_config(name == "run" ? "" : name, f);
    } catch (const ConfigError& e) {
        err << "error: invalid config: " << e.what() << "\n";
        return 2;
    }

    try {
        const Table t = run_experiment(c, err);
        if (c.experiment == "derive" && c.output.empty()) {
            if (f.json_out) {
                json j;
                j["config"] = to_json(c);
                for (size_t i = 0; i < t.columns.size(); ++i) {
                    j["derived"][t.columns[i]] = t.rows[0][i];
                }
                out << j.dump(1) << "\n";
            } else {
                print_derive(t, out);
            }
            return 0;
        }
        const std::string payload = c.format == "json" ? render_json(c, t) : render_csv(c, t);
        if (c.output.empty()) {
            out << payload;
        } else {
            write_atomic(c.output, payload);
        }
    } catch (const ConfigError& e) {
        err << "error: invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace t1cli
