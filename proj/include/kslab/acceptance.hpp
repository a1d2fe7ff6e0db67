#ifndef KSLAB_ACCEPTANCE_HPP
#define KSLAB_ACCEPTANCE_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace kslab::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the listed criteria (1..10; empty = all) and returns their results.
std::vector<CriterionResult> run(const std::vector<int>& ids = {});

/// Runs everything, printing one pass/fail line per criterion. True iff all
/// pass. This is what the CLI `selftest` command executes.
bool run_all(std::ostream& out, const std::vector<int>& ids = {});

} // namespace kslab::acceptance

#endif
