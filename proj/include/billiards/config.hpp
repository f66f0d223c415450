#pragma once

#include "billiards/trajectory.hpp"

#include <iosfwd>
#include <string>

namespace billiards {

// One experiment: a body, a trajectory length and solver settings.
// Parsed from flat key = value text (see parse_config).
struct ExperimentConfig {
    BodyKind kind = BodyKind::Ellipsoid;
    int dim = 0;
    std::vector<double> semi_axes;
    double bump_amplitude = 0.0;
    std::vector<double> bump_coeffs;
    int p = 0;
    SolverConfig solver;
    std::string report_path;
    std::string export_path;

    BodyModel make_body() const; // throws InvalidParams on bad body data
    void validate() const;       // shape checks that do not need the body

    bool operator==(const ExperimentConfig& other) const = default;
};

// Throws ConfigError with "<source>:<line>: ..." context.
ExperimentConfig parse_config(std::istream& in, const std::string& source_name);
ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name);
ExperimentConfig load_config(const std::string& path);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

std::string to_string(BodyKind kind);
BodyKind body_kind_from_string(const std::string& s); // throws ConfigError

} // namespace billiards
