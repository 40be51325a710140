#ifndef SPLP_EXCURSION_OPS_HPP
#define SPLP_EXCURSION_OPS_HPP

#include "splp/path.hpp"

#include <cstddef>
#include <vector>

namespace splp {

/**
 * Local time Γ(ε, ·) as a step function of the level.
 *
 * Interval i is (breakpoints[i], breakpoints[i+1]]. For event paths `counts`
 * holds the number of drift pieces whose value range covers the interval and
 * `density` the occupation density Σ 1/|slope| (count/d when every slope is
 * -d). Grid profiles carry densities only, on half-open bins [r_i, r_{i+1}).
 */
struct LocalTimeProfile {
    enum class Kind { Counts, Density };

    Kind kind = Kind::Counts;
    std::vector<double> breakpoints{0.0};
    std::vector<int> counts;
    std::vector<double> density;

    std::size_t size() const { return breakpoints.size() - 1; }
    /// Interval index holding level r, or size() when r is outside the profile.
    std::size_t interval_of(double r) const;
    int count_at(double r) const;
    double density_at(double r) const;
};

/// (γ, ε_γ): first time the excursion reaches its supremum.
TimeValue gamma(const EventPath& e);
TimeValue gamma(const Path& e);

/// k_γ ε, ending with the jump to the supremum.
EventPath pre_sup(const EventPath& e);
Path pre_sup(const Path& e);

/// θ'_γ ε: starts at 0 and ends at -ε_γ.
EventPath post_sup(const EventPath& e);
Path post_sup(const Path& e);

/// [ρ(k_γ ε), ρ(θ'_γ ε) + ε_γ].
EventPath chi(const EventPath& e);
/// Index-wise version for grid excursions (approximate).
GridPath chi(const GridPath& e);
Path chi(const Path& e);

/// s ↦ ε_γ - ε_s.
EventPath chi_prime(const EventPath& e);
GridPath chi_prime(const GridPath& e);
Path chi_prime(const Path& e);

/// Exact crossing-count profile of an event path; every slope must be nonzero.
LocalTimeProfile local_time_fv(const EventPath& e);

/// Histogram estimate h·#{k : v_k ∈ [jΔr, (j+1)Δr)} / Δr over levels [0, sup].
LocalTimeProfile local_time_grid(const GridPath& e, double dr);

/// For an excursion below the supremum: (ν, -ε_{ν-}), the first time whose
/// left limit equals the infimum, and the depth reached there.
TimeValue nu(const EventPath& e);

}  // namespace splp

#endif  // SPLP_EXCURSION_OPS_HPP
