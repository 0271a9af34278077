// Acceptance harness: runs every verification criterion and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.
#include <cstdio>

#include "kasner/checks.hpp"
#include "kasner/errors.hpp"

int main() {
    kasner::CheckRunner runner;
    int failures = 0;
    for (int id : kasner::CheckRunner::all_ids()) {
        kasner::CriterionResult r;
        try {
            r = runner.criterion(id);
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion crashed";
            r.passed = false;
            r.detail = e.what();
        }
        std::printf("[%s] criterion %d: %s — %s\n",
                    r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str());
        std::fflush(stdout);
        if (!r.passed) ++failures;
    }
    if (failures > 0)
        std::printf("%d criterion(s) failed\n", failures);
    else
        std::printf("all criteria passed\n");
    return failures == 0 ? 0 : 1;
}
