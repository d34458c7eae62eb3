#ifndef SHAPEDIAG_SELFCHECK_HPP
#define SHAPEDIAG_SELFCHECK_HPP

#include <string>
#include <vector>

namespace shapediag {

struct CheckResult {
    std::string module;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Invariant suite behind `shapediag check`. Empty filter runs every module;
// otherwise only checks whose module matches.
std::vector<CheckResult> run_checks(const std::string& module_filter = "");

} // namespace shapediag

#endif
