#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kasner/diagnostics.hpp"

namespace kasner {

// One verification criterion outcome (used by the acceptance harness and
// by `verify`).
struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Shared trajectory cache so criteria can reuse expensive runs.
class CheckRunner {
  public:
    CriterionResult criterion(int id);
    std::vector<CriterionResult> suite(const std::string& name);

    static const std::vector<int>& all_ids();

  private:
    const Trajectory& cached(const std::string& key,
                             const std::function<Trajectory()>& make);
    std::map<std::string, Trajectory> cache_;
};

} // namespace kasner
