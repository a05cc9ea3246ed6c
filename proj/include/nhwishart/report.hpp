#pragma once

#include <string>

namespace nhw {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

// Outcome of an empirical-vs-analytic comparison or a convergence study.
// Invariant: dof = bins_used - 1 >= 1; tv_distance in [0,1] over the common
// support.  metadata echoes config and tolerances as "key=value" text.
struct ComparisonReport {
    double chi2 = 0.0;
    int dof = 1;
    double tv_distance = 0.0;
    long n_samples = 0;
    int bins_used = 0;
    Verdict verdict = Verdict::inconclusive;
    std::string metadata;
};

}  // namespace nhw
