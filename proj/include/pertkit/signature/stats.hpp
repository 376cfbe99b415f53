#pragma once

#include <span>
#include <vector>

namespace pertkit::signature {

// Mid-ranks (1-based, ties averaged) for an arbitrary value vector.
std::vector<double> midranks(std::span<const double> values);

struct MwuResult {
    double u = 0.0;        // U statistic of the first sample (ties count 1/2)
    double p_value = 1.0;  // two-sided
    bool exact = false;    // true when the p-value came from full enumeration
};

// Two-sided Mann-Whitney U test. The exact path enumerates every assignment
// of the pooled values into groups of the observed sizes and counts
// assignments at least as far from the null mean as the observed statistic;
// it is used whenever C(n+m, n) <= max_enumeration. Larger inputs fall back
// to the normal approximation with tie correction and continuity correction.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                         long long max_enumeration = 500000);

// Benjamini-Hochberg step-up adjustment. Returns q-values in input order.
std::vector<double> benjamini_hochberg(std::span<const double> p_values);

double normal_cdf(double x);

}  // namespace pertkit::signature
