#pragma once

#include <string>
#include <vector>

namespace nudgefem {

/// One gated measurement of the property suite.
struct PropertyCheck {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct PropertySuiteOptions {
    std::vector<int> skew_ns{2, 4, 8};
    int skew_pairs = 50;
    int gram_n = 8;
    int gram_ratio_k = 2;
    int random_fields = 6;
    unsigned seed = 1234567u;
    int step_run_n = 8;
    int step_run_steps = 100;
};

// Each check compares against integrals and derivatives computed directly
// from basis evaluations or closed forms, not through the assembled operators.
PropertyCheck check_skew_symmetry(const std::vector<int>& ns, int pairs, unsigned seed);
std::vector<PropertyCheck> check_gram_consistency(int n, int ratio_k, int fields, unsigned seed);
std::vector<PropertyCheck> check_projection(int n, int ratio_k, int random_fields, unsigned seed);
PropertyCheck check_quadrature_exactness();
PropertyCheck check_forcing_residual();
std::vector<PropertyCheck> check_exact_solution();
std::vector<PropertyCheck> check_step_residuals(int n, int steps);

std::vector<PropertyCheck> run_property_suite(const PropertySuiteOptions& options = {});

bool all_passed(const std::vector<PropertyCheck>& checks);

}  // namespace nudgefem
