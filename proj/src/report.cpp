#include "billiards/report.hpp"

#include "billiards/cohomology.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/varsolve.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace billiards {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json vertices_to_json(const std::vector<BoundaryPoint>& vertices) {
    json arr = json::array();
    for (const auto& v : vertices) {
        json coords = json::array();
        for (int c = 0; c < v.position.size(); ++c)
            coords.push_back(v.position[c]);
        arr.push_back(std::move(coords));
    }
    return arr;
}

json betti_to_json(const BettiTable& table) {
    json j = json::object();
    for (const auto& [deg, dim] : table.dims)
        j[std::to_string(deg)] = dim;
    return j;
}

bool bound_applies(int d, int p) { return d >= 3 && p > 2 && is_prime(p); }

} // namespace

std::string compute_verdict(int d, int p, int certified_count, bool bound_applicable, int bound,
                            bool has_continuum) {
    (void)d;
    (void)p;
    if (!bound_applicable)
        return "INAPPLICABLE";
    if (certified_count >= bound)
        return "PASS";
    if (has_continuum)
        return "INAPPLICABLE-DEGENERATE";
    return "FAIL";
}

RunReport run_search(const ExperimentConfig& config, int n_threads) {
    config.validate();
    const BodyModel body = config.make_body();

    RunReport report;
    report.config = config;
    report.seed = config.solver.rng_seed;

    const auto t0 = std::chrono::steady_clock::now();
    const auto candidates = multistart_search(body, config.p, config.solver, n_threads);
    for (const auto& c : candidates)
        if (c.continuum_suspect)
            report.continuum_flagged.push_back(c);
    report.classes = dedup(candidates, kDedupTol, body.diameter());
    const auto t1 = std::chrono::steady_clock::now();

    report.certified_count = static_cast<int>(report.classes.size());
    report.bound_applicable = bound_applies(config.dim, config.p);
    report.bound = report.bound_applicable ? (config.dim - 2) * (config.p - 1) + 2 : 0;
    report.verdict = compute_verdict(config.dim, config.p, report.certified_count,
                                     report.bound_applicable, report.bound,
                                     !report.continuum_flagged.empty());
    report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    return report;
}

json report_to_json(const RunReport& report) {
    const ExperimentConfig& c = report.config;
    json j;
    j["config"] = {{"body", to_string(c.kind)},
                   {"dim", c.dim},
                   {"semi_axes", c.semi_axes},
                   {"bump_amplitude", c.bump_amplitude},
                   {"bump_coeffs", c.bump_coeffs},
                   {"p", c.p},
                   {"solver",
                    {{"n_starts", c.solver.n_starts},
                     {"rng_seed", c.solver.rng_seed},
                     {"max_newton_iters", c.solver.max_newton_iters},
                     {"tol_crit", c.solver.tol_crit},
                     {"edge_factor", c.solver.edge_factor},
                     {"deflation_radius", c.solver.deflation_radius},
                     {"armijo_slope", c.solver.armijo_slope},
                     {"armijo_shrink", c.solver.armijo_shrink}}}};
    j["seed"] = report.seed;
    j["certified_count"] = report.certified_count;
    j["bound_applicable"] = report.bound_applicable;
    j["bound"] = report.bound;
    j["verdict"] = report.verdict;

    json classes = json::array();
    for (const auto& cls : report.classes) {
        json item;
        item["perimeter"] = cls.perimeter;
        item["kkt_residual"] = cls.representative.kkt_residual;
        item["member_count"] = cls.member_count;
        item["signature"] = cls.signature;
        item["vertices"] = vertices_to_json(cls.representative.vertices);
        classes.push_back(std::move(item));
    }
    j["orbit_classes"] = std::move(classes);

    json flagged = json::array();
    for (const auto& t : report.continuum_flagged) {
        json item;
        item["perimeter"] = t.perimeter;
        item["kkt_residual"] = t.kkt_residual;
        item["vertices"] = vertices_to_json(t.vertices);
        flagged.push_back(std::move(item));
    }
    j["continuum_flagged"] = std::move(flagged);

    j["timing"] = {{"wall_seconds", report.wall_seconds}};
    return j;
}

void write_report(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(path + ": cannot open for writing");
    out << report_to_json(report).dump(2) << "\n";
    if (!out)
        throw Error(path + ": write failed");
}

std::string export_trajectories(const RunReport& report) {
    const ExperimentConfig& c = report.config;
    std::ostringstream os;
    os << "# billiards orbit export v1\n";
    os << "# body " << to_string(c.kind) << " dim " << c.dim << " p " << c.p << "\n";
    os << "# semi_axes";
    for (double a : c.semi_axes)
        os << " " << format_double(a);
    os << "\n";
    if (c.kind == BodyKind::BumpedEllipsoid) {
        os << "# bump " << format_double(c.bump_amplitude);
        for (double b : c.bump_coeffs)
            os << " " << format_double(b);
        os << "\n";
    }
    os << "# columns class perimeter kkt_residual member_count flags vertices(p*dim)\n";
    for (std::size_t k = 0; k < report.classes.size(); ++k) {
        const OrbitClass& cls = report.classes[k];
        os << k << "\t" << format_double(cls.perimeter) << "\t"
           << format_double(cls.representative.kkt_residual) << "\t" << cls.member_count << "\t"
           << "converged";
        for (const auto& v : cls.representative.vertices)
            for (int i = 0; i < v.position.size(); ++i)
                os << "\t" << format_double(v.position[i]);
        os << "\n";
    }
    return os.str();
}

void write_export(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(path + ": cannot open for writing");
    out << export_trajectories(report);
    if (!out)
        throw Error(path + ": write failed");
}

ExportFile parse_export(const std::string& text, const std::string& source_name) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ConfigError(source_name + ":" + std::to_string(lineno) + ": " + msg);
    };
    auto next_line = [&]() {
        if (!std::getline(in, line))
            fail("unexpected end of file");
        ++lineno;
    };
    auto parse_double = [&](const std::string& tok) {
        char* end = nullptr;
        const double x = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size())
            fail("expected a number, got '" + tok + "'");
        return x;
    };

    ExportFile file;
    next_line();
    if (line != "# billiards orbit export v1")
        fail("not a billiards orbit export");

    next_line();
    {
        std::istringstream hs(line);
        std::string hash, kw_body, kind, kw_dim, kw_p;
        int dim = 0, p = 0;
        if (!(hs >> hash >> kw_body >> kind >> kw_dim >> dim >> kw_p >> p) || hash != "#" ||
            kw_body != "body" || kw_dim != "dim" || kw_p != "p")
            fail("malformed body header");
        try {
            file.config.kind = body_kind_from_string(kind);
        } catch (const ConfigError& e) {
            fail(e.what());
        }
        file.config.dim = dim;
        file.config.p = p;
    }

    next_line();
    {
        std::istringstream hs(line);
        std::string hash, kw;
        if (!(hs >> hash >> kw) || hash != "#" || kw != "semi_axes")
            fail("malformed semi_axes header");
        std::string tok;
        while (hs >> tok)
            file.config.semi_axes.push_back(parse_double(tok));
    }

    next_line();
    if (line.rfind("# bump ", 0) == 0) {
        std::istringstream hs(line);
        std::string hash, kw, tok;
        hs >> hash >> kw;
        std::vector<double> values;
        while (hs >> tok)
            values.push_back(parse_double(tok));
        if (values.empty())
            fail("malformed bump header");
        file.config.bump_amplitude = values.front();
        file.config.bump_coeffs.assign(values.begin() + 1, values.end());
        next_line();
    }
    if (line.rfind("# columns ", 0) != 0)
        fail("missing columns header");

    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos)
            continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (start <= line.size()) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos)
                break;
            start = tab + 1;
        }
        const std::size_t expected = 5 + static_cast<std::size_t>(file.config.p) * file.config.dim;
        if (fields.size() != expected)
            fail("expected " + std::to_string(expected) + " fields, got " +
                 std::to_string(fields.size()));
        ExportedOrbit orbit;
        orbit.perimeter = parse_double(fields[1]);
        orbit.kkt_residual = parse_double(fields[2]);
        orbit.member_count = static_cast<int>(parse_double(fields[3]));
        orbit.flags = fields[4];
        for (int i = 0; i < file.config.p; ++i) {
            Vec x(file.config.dim);
            for (int c = 0; c < file.config.dim; ++c)
                x[c] = parse_double(fields[5 + i * file.config.dim + c]);
            orbit.vertices.push_back(std::move(x));
        }
        file.orbits.push_back(std::move(orbit));
    }

    return file;
}

ExportFile load_export(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open export file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_export(buf.str(), path);
}

VerifyOutcome verify_export(const ExportFile& file, double tol) {
    const BodyModel body = file.config.make_body();
    VerifyOutcome out;
    for (const auto& orbit : file.orbits) {
        TrajectoryCandidate traj;
        for (const auto& x : orbit.vertices)
            traj.vertices.push_back(BoundaryPoint{x, body.unit_normal(x)});
        const double r = closure_residual(body, traj);
        out.residuals.push_back(r);
        out.worst = std::max(out.worst, r);
    }
    out.all_ok = true;
    for (double r : out.residuals)
        if (!(r <= tol))
            out.all_ok = false;
    return out;
}

json run_cohomology(int d, int p) {
    if (d < 2)
        throw InvalidParams("cohomology requires d >= 2");
    if (!is_prime(p))
        throw InvalidParams("p must be prime");

    json j;
    j["d"] = d;
    j["p"] = p;

    {
        const GradedAlgebra plane = build_plane_config_algebra(d, p);
        const BettiTable table = plane.betti();
        const int expected = (d - 1) * (p - 1);
        AlgebraElement full{AlgebraTerm{1, Exponents(static_cast<std::size_t>(p), 1)}};
        const bool full_zero = plane.normal_form(full).empty();
        j["plane"] = {{"betti", betti_to_json(table)},
                      {"top_degree", table.top_degree},
                      {"expected_top", expected},
                      {"top_dimension", table.dim(table.top_degree)},
                      {"full_product_zero", full_zero},
                      {"ok", table.top_degree == expected && table.dim(0) == 1 && full_zero}};
    }

    if (d >= 3 && p > 2) {
        const GradedAlgebra sphere = build_sphere_config_algebra(d, p);
        const BettiTable table = sphere.betti();
        const int expected = (d - 2) * (p - 1) + 1;
        j["sphere"] = {{"betti", betti_to_json(table)},
                       {"top_degree", table.top_degree},
                       {"expected_top", expected},
                       {"top_dimension", table.dim(table.top_degree)},
                       {"ok", table.top_degree == expected && table.dim(0) == 1}};
    }

    if (bound_applies(d, p)) {
        const IndexBounds b = index_and_bound(d, p);
        j["bounds"] = {{"hind_plane", b.hind_plane},
                       {"hind_sphere", b.hind_sphere},
                       {"dim_bound", b.dim_bound},
                       {"cat_bound", b.cat_bound},
                       {"trajectory_bound", b.trajectory_bound}};
    }
    return j;
}

json merge_reports(const std::vector<json>& reports) {
    json out;
    out["reports"] = json::array();
    int pass = 0, fail_count = 0, inapplicable = 0, degenerate = 0;
    for (const auto& r : reports) {
        out["reports"].push_back(r);
        const std::string verdict = r.contains("verdict") ? r["verdict"].get<std::string>() : "";
        if (verdict == "PASS")
            ++pass;
        else if (verdict == "FAIL")
            ++fail_count;
        else if (verdict == "INAPPLICABLE")
            ++inapplicable;
        else if (verdict == "INAPPLICABLE-DEGENERATE")
            ++degenerate;
    }
    out["summary"] = {{"count", reports.size()},
                      {"pass", pass},
                      {"fail", fail_count},
                      {"inapplicable", inapplicable},
                      {"inapplicable_degenerate", degenerate},
                      {"all_ok", fail_count == 0}};
    return out;
}

} // namespace billiards
