#include "billiards/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace billiards {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ' ';
        out += format_double(values[i]);
    }
    return out;
}

} // namespace

std::string to_string(BodyKind kind) {
    return kind == BodyKind::Ellipsoid ? "ellipsoid" : "bumped_ellipsoid";
}

BodyKind body_kind_from_string(const std::string& s) {
    if (s == "ellipsoid")
        return BodyKind::Ellipsoid;
    if (s == "bumped_ellipsoid")
        return BodyKind::BumpedEllipsoid;
    throw ConfigError("unknown body kind '" + s + "'");
}

BodyModel ExperimentConfig::make_body() const {
    if (kind == BodyKind::Ellipsoid)
        return BodyModel::ellipsoid(semi_axes);
    return BodyModel::bumped_ellipsoid(semi_axes, bump_amplitude, bump_coeffs);
}

void ExperimentConfig::validate() const {
    if (dim < 2)
        throw ConfigError("dim must be at least 2");
    if (static_cast<int>(semi_axes.size()) != dim)
        throw ConfigError("semi_axes must list exactly dim values");
    for (double a : semi_axes)
        if (!(a > 0.0) || !std::isfinite(a))
            throw ConfigError("semi_axes must be positive");
    if (kind == BodyKind::Ellipsoid) {
        if (bump_amplitude != 0.0 || !bump_coeffs.empty())
            throw ConfigError("bump parameters require body = bumped_ellipsoid");
    } else {
        if (static_cast<int>(bump_coeffs.size()) != dim)
            throw ConfigError("bump_coeffs must list exactly dim values");
        if (!(bump_amplitude >= 0.0) || !std::isfinite(bump_amplitude))
            throw ConfigError("bump_amplitude must be >= 0");
    }
    if (p < 2)
        throw ConfigError("p must be at least 2");
    try {
        solver.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source_name) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    bool have_body = false, have_dim = false, have_axes = false, have_p = false;

    auto fail = [&](int ln, const std::string& msg) -> void {
        throw ConfigError(source_name + ":" + std::to_string(ln) + ": " + msg);
    };
    auto parse_double = [&](int ln, const std::string& v) {
        const std::string t = trim(v);
        char* end = nullptr;
        const double x = std::strtod(t.c_str(), &end);
        if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(x))
            fail(ln, "expected a number, got '" + v + "'");
        return x;
    };
    auto parse_int = [&](int ln, const std::string& v) {
        const double x = parse_double(ln, v);
        if (x != std::floor(x) || std::abs(x) > 1e9)
            fail(ln, "expected an integer, got '" + v + "'");
        return static_cast<int>(x);
    };
    auto parse_seed = [&](int ln, const std::string& v) -> std::uint64_t {
        const std::string t = trim(v);
        std::uint64_t out = 0;
        const auto res = std::from_chars(t.c_str(), t.c_str() + t.size(), out);
        if (t.empty() || res.ec != std::errc{} || res.ptr != t.c_str() + t.size())
            fail(ln, "expected an unsigned 64-bit integer, got '" + v + "'");
        return out;
    };
    auto parse_vector = [&](int ln, const std::string& v) {
        std::vector<double> out;
        std::istringstream is(v);
        std::string tok;
        while (is >> tok)
            out.push_back(parse_double(ln, tok));
        if (out.empty())
            fail(ln, "expected a list of numbers");
        return out;
    };

    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#')
            continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            fail(lineno, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            fail(lineno, "empty key");
        if (!seen.insert(key).second)
            fail(lineno, "duplicate key '" + key + "'");

        if (key == "body") {
            try {
                cfg.kind = body_kind_from_string(value);
            } catch (const ConfigError& e) {
                fail(lineno, e.what());
            }
            have_body = true;
        } else if (key == "dim") {
            cfg.dim = parse_int(lineno, value);
            have_dim = true;
        } else if (key == "semi_axes") {
            cfg.semi_axes = parse_vector(lineno, value);
            have_axes = true;
        } else if (key == "bump_amplitude") {
            cfg.bump_amplitude = parse_double(lineno, value);
        } else if (key == "bump_coeffs") {
            cfg.bump_coeffs = parse_vector(lineno, value);
        } else if (key == "p") {
            cfg.p = parse_int(lineno, value);
            have_p = true;
        } else if (key == "n_starts") {
            cfg.solver.n_starts = parse_int(lineno, value);
        } else if (key == "rng_seed") {
            cfg.solver.rng_seed = parse_seed(lineno, value);
        } else if (key == "max_newton_iters") {
            cfg.solver.max_newton_iters = parse_int(lineno, value);
        } else if (key == "tol_crit") {
            cfg.solver.tol_crit = parse_double(lineno, value);
        } else if (key == "edge_factor") {
            cfg.solver.edge_factor = parse_double(lineno, value);
        } else if (key == "deflation_radius") {
            cfg.solver.deflation_radius = parse_double(lineno, value);
        } else if (key == "armijo_slope") {
            cfg.solver.armijo_slope = parse_double(lineno, value);
        } else if (key == "armijo_shrink") {
            cfg.solver.armijo_shrink = parse_double(lineno, value);
        } else if (key == "report_path") {
            cfg.report_path = value;
        } else if (key == "export_path") {
            cfg.export_path = value;
        } else {
            fail(lineno, "unknown key '" + key + "'");
        }
    }

    if (!have_body)
        throw ConfigError(source_name + ": missing required key 'body'");
    if (!have_dim)
        throw ConfigError(source_name + ": missing required key 'dim'");
    if (!have_axes)
        throw ConfigError(source_name + ": missing required key 'semi_axes'");
    if (!have_p)
        throw ConfigError(source_name + ": missing required key 'p'");

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source_name + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name) {
    std::istringstream is(text);
    return parse_config(is, source_name);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open config file");
    return parse_config(in, path);
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream os;
    os << "body = " << to_string(config.kind) << "\n";
    os << "dim = " << config.dim << "\n";
    os << "semi_axes = " << join(config.semi_axes) << "\n";
    if (config.kind == BodyKind::BumpedEllipsoid) {
        os << "bump_amplitude = " << format_double(config.bump_amplitude) << "\n";
        os << "bump_coeffs = " << join(config.bump_coeffs) << "\n";
    }
    os << "p = " << config.p << "\n";
    os << "n_starts = " << config.solver.n_starts << "\n";
    os << "rng_seed = " << config.solver.rng_seed << "\n";
    os << "max_newton_iters = " << config.solver.max_newton_iters << "\n";
    os << "tol_crit = " << format_double(config.solver.tol_crit) << "\n";
    os << "edge_factor = " << format_double(config.solver.edge_factor) << "\n";
    os << "deflation_radius = " << format_double(config.solver.deflation_radius) << "\n";
    os << "armijo_slope = " << format_double(config.solver.armijo_slope) << "\n";
    os << "armijo_shrink = " << format_double(config.solver.armijo_shrink) << "\n";
    if (!config.report_path.empty())
        os << "report_path = " << config.report_path << "\n";
    if (!config.export_path.empty())
        os << "export_path = " << config.export_path << "\n";
    return os.str();
}

} // namespace billiards
