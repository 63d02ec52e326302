#pragma once

#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "suslab/criteria.hpp"
#include "suslab/intensity.hpp"
#include "suslab/simulate.hpp"

/// Configuration parsing, command dispatch and report serialization for the
/// suspension-lab executable.
namespace suslab::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr std::string_view kSchemaVersion = "1.0";

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kConfig = 2,
    kPrecondition = 3,
    kCoverage = 4,
    kAnomaly = 5,
};

enum class Command { check, asymptotics, classify, bracket, clt, claim2, stopping, hopf, scan, tails };
std::string_view to_string(Command c);
std::optional<Command> command_from_string(std::string_view name);

enum class Format { json, csv };

struct CheckParams {
    std::vector<intensity::ConditionId> conditions = {intensity::ConditionId::eq3_1, intensity::ConditionId::eq3_4,
                                                      intensity::ConditionId::aut1, intensity::ConditionId::chi_zero};
    std::int64_t deficit_N = 1000;
    std::vector<std::int64_t> mixing_n = {30, 60, 120};
};

struct AsymptoticsParams {
    std::vector<criteria::SlopeKind> kinds = {criteria::SlopeKind::rn_square_integral,
                                              criteria::SlopeKind::hellinger_growth};
    criteria::FitOptions fit;
};

struct ClassifyParams {
    criteria::FitOptions fit;
    std::optional<criteria::DensityProfile> densities;
    std::int64_t density_N = 1000;
};

struct TailsParams {
    double a = 0.5;
    double b = 0.5;
    std::int64_t L = 10;
    std::optional<double> threshold_A;
};

using Params = std::variant<CheckParams, AsymptoticsParams, ClassifyParams, criteria::BracketOptions,
                            sim::CltOptions, sim::Claim2Options, sim::StoppingOptions, sim::HopfOptions,
                            sim::ScanOptions, TailsParams>;

struct RunConfig {
    Command command = Command::check;
    intensity::IntensityProfile profile = intensity::example_profile(1.0);
    sim::RngSpec rng;
    Params params;
    Format format = Format::json;
    std::optional<std::string> out_path;
};

/// Commands with a per-n or per-t series that can be written as CSV.
bool supports_csv(Command command);

/// Parses a configuration document for the given command. Unknown keys,
/// wrong types and out-of-range knobs raise ConfigError.
RunConfig parse_config(const Json& doc, Command command);

/// The resolved configuration (defaults filled in), echoed into every report.
Json config_echo(const RunConfig& config);

Json profile_to_json(const intensity::IntensityProfile& profile);
intensity::IntensityProfile profile_from_json(const Json& j);

struct RunResult {
    Json body;                      ///< deterministic part of the report
    std::optional<std::string> csv; ///< per-n / per-t series for csv output
    bool anomaly = false;           ///< report written, but exit with kAnomaly
    int workers = 1;
    double runtime_seconds = 0.0;
};

RunResult run(const RunConfig& config);

/// {"header": {...}, "body": result.body}.
Json make_report(const RunConfig& config, const RunResult& result, std::string timestamp);

int exit_code_for(const std::exception_ptr& error);

}  // namespace suslab::cli
