#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace vlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    double budget_seconds = 0;  // 0: no runtime limit
};

struct AcceptanceOptions {
    int threads = 0;
    std::set<int> only;  // empty: all
};

// each result is reported through `report` as soon as it is known
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& report = {});

std::string format_result(const CriterionResult& r);

}  // namespace vlab
