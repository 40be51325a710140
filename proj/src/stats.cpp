#include "splp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace splp {

namespace {

void require_nonempty(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two-sample test needs nonempty samples");
}

/// D from bucket counts: counts_a[k], counts_b[k] per distinct pooled value.
double bucket_statistic(const std::vector<std::size_t>& ca, const std::vector<std::size_t>& cb,
                        double na, double nb) {
    double fa = 0.0, fb = 0.0, d = 0.0;
    for (std::size_t k = 0; k < ca.size(); ++k) {
        fa += static_cast<double>(ca[k]);
        fb += static_cast<double>(cb[k]);
        d = std::max(d, std::abs(fa / na - fb / nb));
    }
    return d;
}

}  // namespace

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    require_nonempty(a, b);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

TwoSampleResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    TwoSampleResult r;
    r.statistic = ks_statistic(a, b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ne = std::sqrt(na * nb / (na + nb));
    r.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * r.statistic);
    return r;
}

bool has_ties(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

TwoSampleResult ks_permutation(const std::vector<double>& a, const std::vector<double>& b,
                               RngStream& rng, std::size_t permutations) {
    require_nonempty(a, b);
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> distinct(pooled);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<std::size_t> bucket(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        bucket[i] = static_cast<std::size_t>(
            std::lower_bound(distinct.begin(), distinct.end(), pooled[i]) - distinct.begin());
    }
    const std::size_t na = a.size();
    const double fa = static_cast<double>(na);
    const double fb = static_cast<double>(b.size());

    std::vector<std::size_t> total(distinct.size(), 0);
    for (std::size_t k : bucket) ++total[k];
    std::vector<std::size_t> ca(distinct.size()), cb(distinct.size());
    const auto statistic = [&]() {
        std::fill(ca.begin(), ca.end(), 0);
        for (std::size_t i = 0; i < na; ++i) ++ca[bucket[i]];
        for (std::size_t k = 0; k < ca.size(); ++k) cb[k] = total[k] - ca[k];
        return bucket_statistic(ca, cb, fa, fb);
    };

    TwoSampleResult r;
    r.permutation = true;
    r.statistic = statistic();
    if (distinct.size() <= 1) {
        r.p_value = 1.0;
        return r;
    }
    const double observed = r.statistic - 1e-12;
    std::size_t exceed = 0;
    for (std::size_t p = 0; p < permutations; ++p) {
        // Partial Fisher–Yates: only the first na slots are needed.
        for (std::size_t i = 0; i < na; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, bucket.size() - 1);
            std::swap(bucket[i], bucket[pick(rng.engine())]);
        }
        if (statistic() >= observed) ++exceed;
    }
    r.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + permutations);
    return r;
}

TwoSampleResult two_sample_test(const std::vector<double>& a, const std::vector<double>& b,
                                bool discrete, RngStream& rng, std::size_t permutations) {
    require_nonempty(a, b);
    const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    const auto [lo2, hi2] = std::minmax_element(b.begin(), b.end());
    if (*lo == *hi && *lo2 == *hi2 && *lo == *lo2) return {};
    if (discrete || has_ties(a, b)) return ks_permutation(a, b, rng, permutations);
    return ks_two_sample(a, b);
}

}  // namespace splp
