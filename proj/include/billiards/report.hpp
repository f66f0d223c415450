#pragma once

#include "billiards/config.hpp"
#include "billiards/symmetry.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace billiards {

using json = nlohmann::ordered_json;

// Search outcome: certified orbit classes, continuum-flagged candidates kept
// aside, and the verdict against the bound B(d,p) = (d-2)(p-1)+2.
//
// Verdicts:
//   PASS                    d >= 3, p an odd prime, certified count >= B
//   FAIL                    bound applicable but the count fell short
//   INAPPLICABLE-DEGENERATE bound applicable, count short, but continuum
//                           families were detected (the isolated-orbit count
//                           is ill-posed for such bodies)
//   INAPPLICABLE            bound not applicable (d < 3 or p not an odd prime)
struct RunReport {
    ExperimentConfig config;
    std::vector<OrbitClass> classes; // sorted by (perimeter, signature)
    std::vector<TrajectoryCandidate> continuum_flagged;
    int certified_count = 0;
    bool bound_applicable = false;
    int bound = 0;
    std::string verdict;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
};

std::string compute_verdict(int d, int p, int certified_count, bool bound_applicable, int bound,
                            bool has_continuum);

RunReport run_search(const ExperimentConfig& config, int n_threads = 0);

// Whole report as one JSON document. Deterministic except for the "timing"
// field, which is kept separate so byte comparisons can drop it.
json report_to_json(const RunReport& report);
void write_report(const RunReport& report, const std::string& path);

// Tab-separated orbit export: body descriptor in '#' header lines, then one
// record per class with full-precision vertex coordinates. Deterministic;
// header-only when there are no classes.
std::string export_trajectories(const RunReport& report);
void write_export(const RunReport& report, const std::string& path);

struct ExportedOrbit {
    double perimeter = 0.0;
    double kkt_residual = 0.0;
    int member_count = 0;
    std::string flags;
    std::vector<Vec> vertices;
};

struct ExportFile {
    ExperimentConfig config; // body fields and p only
    std::vector<ExportedOrbit> orbits;
};

ExportFile parse_export(const std::string& text, const std::string& source_name);
ExportFile load_export(const std::string& path);

// Re-shoots every exported orbit and reports the closure residual.
struct VerifyOutcome {
    std::vector<double> residuals;
    double worst = 0.0;
    bool all_ok = false;
};

VerifyOutcome verify_export(const ExportFile& file, double tol = 1e-8);

// Betti tables, top degrees and the bound record for one (d, p), with
// cross-check verdicts. Plane part needs d >= 2; sphere part d >= 3 and
// p > 2; the bound record additionally needs p odd prime.
json run_cohomology(int d, int p);

// Bundles several run reports into one document with a pass/fail summary.
json merge_reports(const std::vector<json>& reports);

} // namespace billiards
