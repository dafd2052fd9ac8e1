// The acceptance suite: one tolerance-pinned check per shipped claim,
// runnable from the CLI (`illiq accept`) and from ctest.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace illiq {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AcceptanceOptions {
    std::string out_dir;           // scratch space; temp dir when empty
    unsigned threads = 1;
    std::uint64_t seed_offset = 0; // criteria are tolerance-based, not value-pinned
    std::vector<int> only;         // criterion ids to run; empty = all
};

// Reference normal distribution function used by the acceptance
// criteria.  ILLIQ_FAULT_PHI=1 injects a broken version (test
// scaffolding for the suite's own failure path).
double acceptance_phi(double x);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

// Prints one PASS/FAIL line per criterion; returns 0 when everything
// passed and 5 otherwise.
int report_acceptance(const std::vector<CriterionResult>& results, std::ostream& os);

}  // namespace illiq
