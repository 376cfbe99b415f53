#include "pertkit/signature/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "pertkit/common/errors.hpp"

namespace pertkit::signature {

namespace {

// C(n, k) capped at `cap` (returns cap + 1 on overflow past the cap).
long long binomial_capped(int n, int k, long long cap) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    long long result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        if (result > cap) {
            return cap + 1;
        }
    }
    return result;
}

// Doubled mid-ranks of the pooled sorted values: rank*2 is always integral,
// which keeps the exact path in integer arithmetic.
std::vector<int64_t> doubled_midranks_sorted(const std::vector<double>& sorted) {
    const size_t n = sorted.size();
    std::vector<int64_t> out(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) {
            ++j;
        }
        // positions i+1 .. j+1 (1-based); doubled midrank = (i+1) + (j+1)
        int64_t dr = static_cast<int64_t>(i + 1) + static_cast<int64_t>(j + 1);
        for (size_t k = i; k <= j; ++k) {
            out[k] = dr;
        }
        i = j + 1;
    }
    return out;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                         long long max_enumeration) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (n < 1 || m < 1) {
        throw InputError("mann_whitney_u: both samples must be non-empty");
    }
    const int total = n + m;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> ranks = midranks(pooled);

    double rank_sum_a = 0.0;
    for (int i = 0; i < n; ++i) {
        rank_sum_a += ranks[i];
    }
    const double u = rank_sum_a - static_cast<double>(n) * (n + 1) / 2.0;

    MwuResult res;
    res.u = u;

    const long long combos = binomial_capped(total, n, max_enumeration);
    if (combos <= max_enumeration) {
        // Exact: count index subsets whose statistic deviates from nm/2 at
        // least as much as the observed one. All quantities are doubled so
        // the comparison is pure integer arithmetic.
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int64_t> dranks = doubled_midranks_sorted(sorted);

        // twoU(S) = sum of doubled ranks over S minus n(n+1); its null mean
        // is nm. Deviations |twoU - nm| are integers.
        const int64_t two_u_mean = static_cast<int64_t>(n) * m;
        const int64_t rank_base = static_cast<int64_t>(n) * (n + 1);
        const int64_t two_u_obs = static_cast<int64_t>(std::llround(2.0 * u));
        const int64_t dev_obs = std::llabs(two_u_obs - two_u_mean);

        long long hits = 0;
        long long count = 0;
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        int64_t sum = 0;
        for (int i : idx) {
            sum += dranks[i];
        }
        while (true) {
            ++count;
            const int64_t two_u = sum - rank_base;
            if (std::llabs(two_u - two_u_mean) >= dev_obs) {
                ++hits;
            }
            // next combination in lexicographic order
            int i = n - 1;
            while (i >= 0 && idx[i] == total - n + i) {
                --i;
            }
            if (i < 0) {
                break;
            }
            sum -= dranks[idx[i]];
            ++idx[i];
            sum += dranks[idx[i]];
            for (int j = i + 1; j < n; ++j) {
                sum -= dranks[idx[j]];
                idx[j] = idx[j - 1] + 1;
                sum += dranks[idx[j]];
            }
        }
        res.p_value = static_cast<double>(hits) / static_cast<double>(count);
        res.exact = true;
        return res;
    }

    // Normal approximation with tie correction.
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) {
            ++j;
        }
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double nm = static_cast<double>(n) * m;
    const double var =
        nm / 12.0 * (static_cast<double>(total + 1) -
                     tie_term / (static_cast<double>(total) * (total - 1)));
    if (var <= 0.0) {
        res.p_value = 1.0;  // every pooled value identical
        res.exact = false;
        return res;
    }
    const double dev = std::max(0.0, std::fabs(u - nm / 2.0) - 0.5);  // continuity
    const double z = dev / std::sqrt(var);
    res.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
    res.exact = false;
    return res;
}

std::vector<double> benjamini_hochberg(std::span<const double> p_values) {
    const size_t n = p_values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> q(n, 0.0);
    double running_min = 1.0;
    for (size_t k = n; k-- > 0;) {
        const double adj = p_values[order[k]] * static_cast<double>(n) /
                           static_cast<double>(k + 1);
        running_min = std::min(running_min, adj);
        q[order[k]] = std::min(1.0, running_min);
    }
    return q;
}

}  // namespace pertkit::signature
