#include "adveig/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "adveig/errors.hpp"
#include "adveig/report.hpp"

namespace adveig {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

double to_double(const std::string& s, int line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        raise("ConfigError", "line " + std::to_string(line) + ": expected a number, got '" + s + "'");
    return v;
}

int to_int(const std::string& s, int line) {
    const double v = to_double(s, line);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        raise("ConfigError", "line " + std::to_string(line) + ": expected an integer, got '" + s + "'");
    return i;
}

std::vector<double> to_list(const std::string& s, int line) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            raise("ConfigError", "line " + std::to_string(line) + ": empty list entry");
        out.push_back(to_double(item, line));
    }
    if (out.empty()) raise("ConfigError", "line " + std::to_string(line) + ": empty list");
    return out;
}

struct Entry {
    std::string section, key, value;
    int line;
};

void apply_entry(ProblemConfig& cfg, const Entry& e) {
    const std::string& s = e.section;
    const std::string& k = e.key;
    const std::string v = unquote(e.value);
    auto bad_key = [&]() {
        raise("ConfigError", "line " + std::to_string(e.line) + ": unknown key '" +
                                 (s.empty() ? k : s + "." + k) + "'");
    };

    if (s.empty()) {
        if (k == "preset") {
            apply_preset(cfg, v);
            cfg.preset = v;
            return;
        }
        bad_key();
    } else if (s == "domain") {
        if (k == "dim") cfg.dim = to_int(v, e.line);
        else if (k == "x0") cfg.x0 = to_double(v, e.line);
        else if (k == "x1") cfg.x1 = to_double(v, e.line);
        else if (k == "y0") cfg.y0 = to_double(v, e.line);
        else if (k == "y1") cfg.y1 = to_double(v, e.line);
        else if (k == "nx") cfg.nx = to_int(v, e.line);
        else if (k == "ny") { cfg.ny = to_int(v, e.line); if (cfg.dim == 1) cfg.dim = 2; }
        else bad_key();
    } else if (s == "bc") {
        if (k == "b") cfg.b = to_double(v, e.line);
        else bad_key();
    } else if (s == "coefficients") {
        if (k == "a") cfg.a_expr = v;
        else if (k == "c") cfg.c_expr = v;
        else bad_key();
    } else if (s == "flow") {
        if (k == "type") cfg.flow_type = v;
        else if (k == "psi") cfg.psi_expr = v;
        else if (k == "alpha") cfg.alpha_expr = v;
        else if (k == "direction") cfg.shear_direction = v;
        else if (k == "m") cfg.m_expr = v;
        else if (k == "vx") cfg.vx = to_double(v, e.line);
        else if (k == "vy") cfg.vy = to_double(v, e.line);
        else bad_key();
    } else if (s == "amplitudes") {
        if (k == "values") cfg.amplitudes = to_list(v, e.line);
        else if (k == "a_max") cfg.a_max = to_double(v, e.line);
        else bad_key();
    } else if (s == "solver") {
        if (k == "tol") cfg.solver.tol = to_double(v, e.line);
        else if (k == "max_iter") cfg.solver.max_iter = to_int(v, e.line);
        else if (k == "shift") { cfg.solver.shift = to_double(v, e.line); cfg.solver.has_shift = true; }
        else bad_key();
    } else if (s == "analysis") {
        if (k == "degree") cfg.fi_degree = to_int(v, e.line);
        else if (k == "delta") cfg.ce_delta = to_double(v, e.line);
        else bad_key();
    } else if (s == "output") {
        if (k == "dir") cfg.out_dir = v;
        else bad_key();
    } else {
        raise("ConfigError", "line " + std::to_string(e.line) + ": unknown section '" + s + "'");
    }
}

}  // namespace

std::vector<double> parse_amplitude_list(const std::string& text) {
    return to_list(text, 0);
}

ProblemConfig parse_config_text(const std::string& text, const std::string& whence) {
    ProblemConfig cfg;
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    std::vector<Entry> entries;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                raise("ConfigError",
                      whence + " line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            raise("ConfigError", whence + " line " + std::to_string(lineno) + ": expected key = value");
        entries.push_back(
            {section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
    }
    for (const Entry& e : entries) apply_entry(cfg, e);
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise("ConfigError", "config not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

void apply_preset(ProblemConfig& cfg, const std::string& name) {
    auto one_d = [&](int nx) {
        cfg.dim = 1;
        cfg.x0 = 0.0;
        cfg.x1 = 1.0;
        cfg.nx = nx;
    };
    auto unit_square = [&](int n) {
        cfg.dim = 2;
        cfg.x0 = cfg.y0 = 0.0;
        cfg.x1 = cfg.y1 = 1.0;
        cfg.nx = cfg.ny = n;
    };
    if (name == "P1") {
        one_d(513);
        cfg.b = 1.0;
        cfg.a_expr = "1";
        cfg.c_expr = "0";
        cfg.flow_type = "constant";
        cfg.vx = 1.0;
        cfg.amplitudes = {0, 1, 2, 4};
    } else if (name == "P2") {
        unit_square(65);
        cfg.b = 0.0;
        cfg.a_expr = "1";
        cfg.c_expr = "0";
        cfg.flow_type = "stream";
        cfg.psi_expr = "sin(pi*x)*sin(pi*y)";
        cfg.amplitudes = {0, 2, 4, 8, 16};
    } else if (name == "P3") {
        unit_square(129);
        cfg.b = 0.0;
        cfg.a_expr = "1";
        cfg.c_expr = "cos(pi*x)";
        cfg.flow_type = "stream";
        cfg.psi_expr = "sin(pi*x)*sin(pi*y)";
        cfg.amplitudes = {0, 1, 2, 4, 8, 16};
    } else if (name == "P4") {
        unit_square(129);
        cfg.b = 0.5;
        cfg.a_expr = "1";
        cfg.c_expr = "cos(pi*x)";
        cfg.flow_type = "stream";
        cfg.psi_expr = "sin(pi*x)*sin(pi*y)";
        cfg.amplitudes = {0, 1, 2, 4, 8, 16, 32, 64};
        cfg.a_max = 64.0;
    } else if (name == "P5") {
        one_d(8193);
        cfg.b = 0.0;
        cfg.a_expr = "1";
        cfg.c_expr = "x";
        cfg.flow_type = "constant";
        cfg.vx = 1.0;
        cfg.amplitudes = {0, 100};
    } else {
        raise("ConfigError", "unknown preset '" + name + "'");
    }
}

FlowSpec flow_spec_of(const ProblemConfig& cfg) {
    FlowSpec fs;
    if (cfg.flow_type == "zero") {
        fs.kind = FlowKind::Zero;
    } else if (cfg.flow_type == "constant") {
        fs.kind = FlowKind::Constant;
        fs.cx = cfg.vx;
        fs.cy = cfg.vy;
    } else if (cfg.flow_type == "shear") {
        fs.kind = FlowKind::Shear;
        if (cfg.alpha_expr.empty()) raise("ConfigError", "shear flow needs flow.alpha");
        fs.alpha = expr::parse(cfg.alpha_expr);
        if (cfg.shear_direction == "x") fs.shear_direction = 0;
        else if (cfg.shear_direction == "y") fs.shear_direction = 1;
        else raise("ConfigError", "flow.direction must be x or y");
    } else if (cfg.flow_type == "stream") {
        fs.kind = FlowKind::StreamFunction;
        if (cfg.psi_expr.empty()) raise("ConfigError", "stream flow needs flow.psi");
        fs.psi = expr::parse(cfg.psi_expr);
    } else if (cfg.flow_type == "gradient") {
        fs.kind = FlowKind::Gradient;
        if (cfg.m_expr.empty()) raise("ConfigError", "gradient flow needs flow.m");
        fs.m = expr::parse(cfg.m_expr);
    } else {
        raise("ConfigError", "unknown flow type '" + cfg.flow_type + "'");
    }
    return fs;
}

ProblemSpec to_problem(const ProblemConfig& cfg) {
    GridSpec gs;
    gs.dim = cfg.dim;
    gs.x0 = cfg.x0;
    gs.x1 = cfg.x1;
    gs.y0 = cfg.y0;
    gs.y1 = cfg.y1;
    gs.nx = cfg.nx;
    gs.ny = cfg.ny;
    try {
        return make_problem(gs, cfg.b, cfg.a_expr, cfg.c_expr, flow_spec_of(cfg), cfg.solver);
    } catch (const Error& e) {
        if (e.kind() == "ConfigError") throw;
        raise("ConfigError", e.what());
    }
}

std::map<std::string, std::string> ProblemConfig::effective() const {
    std::map<std::string, std::string> m;
    if (!preset.empty()) m["preset"] = preset;
    m["domain.dim"] = std::to_string(dim);
    m["domain.x0"] = format_double(x0);
    m["domain.x1"] = format_double(x1);
    m["domain.nx"] = std::to_string(nx);
    if (dim == 2) {
        m["domain.y0"] = format_double(y0);
        m["domain.y1"] = format_double(y1);
        m["domain.ny"] = std::to_string(ny);
    }
    m["bc.b"] = format_double(b);
    m["coefficients.a"] = a_expr;
    m["coefficients.c"] = c_expr;
    m["flow.type"] = flow_type;
    if (!psi_expr.empty()) m["flow.psi"] = psi_expr;
    if (!alpha_expr.empty()) {
        m["flow.alpha"] = alpha_expr;
        m["flow.direction"] = shear_direction;
    }
    if (!m_expr.empty()) m["flow.m"] = m_expr;
    if (flow_type == "constant") {
        m["flow.vx"] = format_double(vx);
        if (dim == 2) m["flow.vy"] = format_double(vy);
    }
    std::string amps;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (i) amps += ',';
        amps += format_double(amplitudes[i]);
    }
    m["amplitudes.values"] = amps;
    if (a_max > 0.0) m["amplitudes.a_max"] = format_double(a_max);
    m["solver.tol"] = format_double(solver.tol);
    m["solver.max_iter"] = std::to_string(solver.max_iter);
    if (solver.has_shift) m["solver.shift"] = format_double(solver.shift);
    m["analysis.degree"] = std::to_string(fi_degree);
    m["analysis.delta"] = format_double(ce_delta);
    m["output.dir"] = out_dir;
    return m;
}

}  // namespace adveig
