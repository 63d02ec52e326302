#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "suslab/cli.hpp"
#include "suslab/errors.hpp"

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

suslab::cli::Json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw suslab::ConfigError("cannot open config file '" + path + "'");
    try {
        return suslab::cli::Json::parse(in);
    } catch (const suslab::cli::Json::parse_error& e) {
        throw suslab::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

void write_output(const std::string& text, const std::optional<std::string>& path) {
    if (!path || *path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw suslab::ConfigError("cannot write output file '" + *path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace suslab::cli;

    CLI::App app{"suspension-lab: nonsingular Poisson suspensions on Z, computed"};
    std::string command_name;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    std::optional<std::string> format_name;
    app.add_option("command", command_name,
                   "check | asymptotics | classify | bracket | clt | claim2 | stopping | hopf | scan | tails")
        ->required();
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--seed", seed, "override rng.seed");
    app.add_option("--out", out_path, "output path (stdout if omitted)");
    app.add_option("--format", format_name, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.footer(
        "Exit codes: 0 ok, 1 internal error, 2 configuration error, 3 precondition violated,\n"
        "4 coverage error, 5 anomaly. SUSPENSION_LAB_WORKERS sets the worker count.");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        const auto command = command_from_string(command_name);
        if (!command) throw suslab::ConfigError("unknown command '" + command_name + "'");
        RunConfig config = parse_config(read_config(config_path), *command);
        if (seed) config.rng.seed = *seed;
        if (out_path) config.out_path = *out_path;
        if (format_name) config.format = *format_name == "csv" ? Format::csv : Format::json;

        const RunResult result = run(config);
        if (config.format == Format::csv) {
            std::ostringstream text;
            text << "# suspension-lab " << kVersion << " command=" << to_string(config.command)
                 << " seed=" << config.rng.seed << " stream=" << config.rng.stream << '\n'
                 << *result.csv;
            write_output(text.str(), config.out_path);
        } else {
            write_output(make_report(config, result, utc_timestamp()).dump(2) + "\n", config.out_path);
        }
        if (result.anomaly) {
            std::cerr << "suspension-lab: anomaly flagged in the report\n";
            return kAnomaly;
        }
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "suspension-lab: " << e.what() << '\n';
        return exit_code_for(std::current_exception());
    } catch (...) {
        std::cerr << "suspension-lab: unknown failure\n";
        return kInternal;
    }
}
