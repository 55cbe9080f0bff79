#pragma once
// Flat `key = value` config files with bracketed sections and quoted
// expression strings. Unknown sections or keys are rejected with the line
// number. `preset = P1..P5` pre-fills the named study; explicit keys
// override preset values.

#include <map>
#include <string>
#include <vector>

#include "adveig/analysis.hpp"

namespace adveig {

struct ProblemConfig {
    std::string preset;

    int dim = 1;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    int nx = 65, ny = 65;

    double b = 0.0;
    std::string a_expr = "1";
    std::string c_expr = "0";

    std::string flow_type = "zero";  // zero|constant|shear|stream|gradient
    std::string psi_expr, alpha_expr, m_expr;
    std::string shear_direction = "x";
    double vx = 0.0, vy = 0.0;

    std::vector<double> amplitudes{0.0};
    double a_max = 0.0;  // geometric schedule cap for `limit`

    SolverOptions solver;
    int fi_degree = 6;      // first-integral family degree
    double ce_delta = 0.05;  // counterexample closeness to c(0)

    std::string out_dir = "out";

    // Flattened "section.key" -> value view of the effective configuration,
    // echoed into every report so results are reproducible from output.
    std::map<std::string, std::string> effective() const;
};

// Throws Error("ConfigError") with the offending line number.
ProblemConfig parse_config_text(const std::string& text, const std::string& whence);
ProblemConfig load_config(const std::string& path);

// Comma-separated doubles ("0,1,2,4"), used for config values and --A.
std::vector<double> parse_amplitude_list(const std::string& text);

void apply_preset(ProblemConfig& cfg, const std::string& name);

FlowSpec flow_spec_of(const ProblemConfig& cfg);
ProblemSpec to_problem(const ProblemConfig& cfg);

}  // namespace adveig
