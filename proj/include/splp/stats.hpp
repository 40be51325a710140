#ifndef SPLP_STATS_HPP
#define SPLP_STATS_HPP

#include "splp/rng.hpp"

#include <cstddef>
#include <vector>

namespace splp {

struct TwoSampleResult {
    double statistic = 0.0;  // D = sup |F_A - F_B|
    double p_value = 1.0;
    bool permutation = false;
};

/// D = sup |F̂_A - F̂_B|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Q_KS(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}.
double kolmogorov_survival(double lambda);

/// Asymptotic two-sample Kolmogorov–Smirnov test with the small-sample
/// correction λ = (√n_e + 0.12 + 0.11/√n_e) D, n_e = n_A n_B / (n_A + n_B).
TwoSampleResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

/// KS statistic with a permutation p-value (p = (1 + #{D* ≥ D}) / (1 + P)).
/// Safe for samples with ties.
TwoSampleResult ks_permutation(const std::vector<double>& a, const std::vector<double>& b,
                               RngStream& rng, std::size_t permutations = 2000);

bool has_ties(const std::vector<double>& a, const std::vector<double>& b);

/// Permutation test when `discrete` is set or the pooled sample has ties,
/// asymptotic KS otherwise. Degenerate data (a single value overall) give p = 1.
TwoSampleResult two_sample_test(const std::vector<double>& a, const std::vector<double>& b,
                                bool discrete, RngStream& rng, std::size_t permutations = 2000);

}  // namespace splp

#endif  // SPLP_STATS_HPP
