#pragma once

// Command-line front end. Configuration is resolved in three layers:
// named preset, then --config file, then individual flags.

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace t1cli {

struct Config {
    std::string experiment = "decay";
    std::string preset;

    double v_perp = 5.0;
    double delta_omega = 0.0;
    std::vector<double> delta_omegas;   // decay panels / pulse-loss sweep
    double clamp_factor = 50.0;
    std::optional<double> epsilon;

    double gamma1_q = 1.0;
    double gamma1_m = 0.0;
    double gammaphi_q = 0.0;
    double gammaphi_m = 0.0;

    std::string model = "secular";
    std::string pulses = "ideal";
    bool recovery = true;
    std::string clamped = "clamp";

    double t_max = 4.0;
    int points = 201;
    std::optional<double> free_time;
    double sample_dt = 0.01;

    std::string output;  // empty: stdout
    std::string format = "csv";
};

/// Invalid configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

const std::vector<std::string>& preset_names();

/// Throws ConfigError for an unknown name.
Config preset(const std::string& name);

nlohmann::json to_json(const Config& c);

/// Overlays the keys of j onto base.
Config apply_json(Config base, const nlohmann::json& j);

/// Reads a config from a JSON config, a JSON output file or a CSV output file.
nlohmann::json load_config_file(const std::string& path);

/// "a,b,c" or "start:stop:count".
std::vector<double> parse_list(const std::string& key, const std::string& text);

/// Fills defaults that depend on other keys and checks every value.
Config resolve(Config c);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::json extra = nlohmann::json::object();  // merged into JSON output
};

/// Runs the experiment of a resolved config. Warnings go to diag.
Table run_experiment(const Config& c, std::ostream& diag);

/// Shortest text that reads back to the same double.
std::string format_number(double x);

std::string render_csv(const Config& c, const Table& t);
std::string render_json(const Config& c, const Table& t);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

/// Full command line; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace t1cli
