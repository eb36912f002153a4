#pragma once

#include <string>
#include <vector>

namespace osqm {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string measured;  // the numbers the verdict rests on
    std::string limit;     // the pinned tolerance
};

// Tolerances of the acceptance criteria. The defaults are the contract; the
// fields exist so the harness can be checked against a corrupted fixture.
struct Tolerances {
    double roundtrip_fidelity = 1e-6;
    double roundtrip_operator = 1e-8;
    double marginal = 1e-8;
    double moyal = 1e-6;
    double associativity = 1e-6;
    double dynamics = 1e-5;
    double completeness = 1e-6;
    double positivity = 1e-8;
    double defect_slope = 0.5, defect_slope_tol = 0.15;
    double projector_algebra = 1e-10;
    double projector_closeness = 3;
    double born = 0.015;
    double zeno_slope = 2, zeno_slope_tol = 0.2;
    double flow_factor = 5;
};

struct RegressionOptions {
    std::string out_dir = "regress";
    Tolerances tol;
    std::vector<int> only;  // empty: criteria 1..11
};

// Runs criteria 1..11, writes their data files and report.json (no timings)
// under out_dir.
std::vector<CriterionResult> run_regression_suite(const RegressionOptions& opt);

// Criterion 12: every file under a also exists under b with identical bytes.
CriterionResult compare_outputs(const std::string& a, const std::string& b);

// Runs the suite twice into out_dir/run1 and out_dir/run2 and adds criterion 12.
std::vector<CriterionResult> run_acceptance(const RegressionOptions& opt);

std::string format_result(const CriterionResult& r);

}  // namespace osqm
