#include "billiards/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using billiards::json;

int exit_code_for(const std::string& verdict) { return verdict == "FAIL" ? 1 : 0; }

int cmd_search(const std::string& config_path, int threads, std::string report_path,
               std::string export_path) {
    const auto config = billiards::load_config(config_path);
    if (report_path.empty())
        report_path = config.report_path;
    if (export_path.empty())
        export_path = config.export_path;

    const auto report = billiards::run_search(config, threads);
    const json doc = billiards::report_to_json(report);
    if (report_path.empty())
        std::cout << doc.dump(2) << "\n";
    else
        billiards::write_report(report, report_path);
    if (!export_path.empty())
        billiards::write_export(report, export_path);

    std::cout << "certified_count = " << report.certified_count << "\n";
    if (report.bound_applicable)
        std::cout << "bound B(" << config.dim << "," << config.p << ") = " << report.bound << "\n";
    std::cout << "continuum_flagged = " << report.continuum_flagged.size() << "\n";
    std::cout << "verdict = " << report.verdict << "\n";
    return exit_code_for(report.verdict);
}

int cmd_cohomology(int d, int p, bool as_json) {
    const json doc = billiards::run_cohomology(d, p);
    if (as_json) {
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    auto print_table = [](const char* name, const json& part) {
        std::cout << name << " algebra: top degree " << part["top_degree"] << " (expected "
                  << part["expected_top"] << "), betti";
        for (const auto& [deg, dim] : part["betti"].items())
            std::cout << " " << deg << ":" << dim.get<int>();
        std::cout << (part["ok"].get<bool>() ? "  [ok]" : "  [MISMATCH]") << "\n";
    };
    print_table("plane", doc["plane"]);
    if (doc.contains("sphere"))
        print_table("sphere", doc["sphere"]);
    if (doc.contains("bounds")) {
        const json& b = doc["bounds"];
        std::cout << "hind_plane = " << b["hind_plane"] << ", hind_sphere = " << b["hind_sphere"]
                  << ", dim_bound = " << b["dim_bound"] << ", cat_bound = " << b["cat_bound"]
                  << ", trajectory_bound = " << b["trajectory_bound"] << "\n";
    }
    return 0;
}

int cmd_verify(const std::string& export_path, double tol) {
    const auto file = billiards::load_export(export_path);
    const auto outcome = billiards::verify_export(file, tol);
    for (std::size_t i = 0; i < outcome.residuals.size(); ++i)
        std::cout << "orbit " << i << ": closure_residual = " << outcome.residuals[i] << "\n";
    std::cout << "worst = " << outcome.worst << " (tol " << tol << ")\n";
    std::cout << (outcome.all_ok ? "OK" : "MISMATCH") << "\n";
    return outcome.all_ok ? 0 : 1;
}

int cmd_merge(const std::string& out_path, const std::vector<std::string>& inputs) {
    std::vector<json> reports;
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in)
            throw billiards::ConfigError(path + ": cannot open report");
        try {
            reports.push_back(json::parse(in));
        } catch (const json::parse_error& e) {
            throw billiards::ConfigError(path + ": " + e.what());
        }
    }
    const json merged = billiards::merge_reports(reports);
    std::ofstream out(out_path);
    if (!out)
        throw billiards::Error(out_path + ": cannot open for writing");
    out << merged.dump(2) << "\n";
    const auto& s = merged["summary"];
    std::cout << "merged " << s["count"] << " reports: " << s["pass"] << " pass, " << s["fail"]
              << " fail, " << s["inapplicable"].get<int>() + s["inapplicable_degenerate"].get<int>()
              << " inapplicable\n";
    return s["fail"].get<int>() == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic billiard orbit finder and bound verifier"};
    app.require_subcommand(1);

    std::string config_path, export_file, merge_out;
    std::vector<std::string> merge_in;
    std::string report_override, export_override;
    int threads = 0;
    int d = 0, p = 0;
    bool as_json = false;
    double tol = 1e-8;

    auto* search = app.add_subcommand("search", "run a multistart orbit search from a config");
    search->add_option("config", config_path, "experiment config file")->required();
    search->add_option("--threads", threads, "worker threads (0 = hardware)");
    search->add_option("--report", report_override, "report output path (overrides config)");
    search->add_option("--export", export_override, "orbit export path (overrides config)");

    auto* coh = app.add_subcommand("cohomology", "Betti tables and bound arithmetic for (d, p)");
    coh->add_option("d", d, "ambient dimension")->required();
    coh->add_option("p", p, "trajectory length (prime)")->required();
    coh->add_flag("--json", as_json, "emit the full JSON fragment");

    auto* verify = app.add_subcommand("verify", "re-shoot exported orbits through the billiard map");
    verify->add_option("export", export_file, "orbit export file")->required();
    verify->add_option("--tol", tol, "closure residual tolerance");

    auto* report = app.add_subcommand("report", "report utilities");
    auto* merge = report->add_subcommand("merge", "bundle several run reports");
    merge->add_option("out", merge_out, "merged output path")->required();
    merge->add_option("inputs", merge_in, "input report files")->required()->expected(-1);
    report->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (*search)
            return cmd_search(config_path, threads, report_override, export_override);
        if (*coh)
            return cmd_cohomology(d, p, as_json);
        if (*verify)
            return cmd_verify(export_file, tol);
        if (*merge)
            return cmd_merge(merge_out, merge_in);
    } catch (const billiards::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const billiards::InvalidParams& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
