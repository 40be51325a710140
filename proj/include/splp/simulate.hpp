#ifndef SPLP_SIMULATE_HPP
#define SPLP_SIMULATE_HPP

#include "splp/levy_model.hpp"
#include "splp/path.hpp"
#include "splp/rng.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace splp {

/// Thrown when a simulation exceeds its event or wall-clock budget.
class ResourceCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimLimits {
    std::size_t max_events = 100'000'000;
    double max_seconds = 10.0;
};

struct Horizon {
    double time;
};
/// Stop at the first time the path reaches `level` (below its start).
struct FirstPassage {
    double level;
};
/// Stop when the n-th excursion of X - I away from 0 closes.
struct ExcursionCount {
    std::size_t count;
};
using StopRule = std::variant<Horizon, FirstPassage, ExcursionCount>;

/// Exact path of a finite-variation model: drift -d between jumps arriving
/// at rate b with sizes drawn from Π/b.
EventPath sample_path_fv(const LevyModel& m, const StopRule& stop, RngStream& rng,
                         double start = 0.0, const SimLimits& limits = {});

/// Euler scheme v_{k+1} = v_k - d h + √(2βh) N(0,1) + (jumps in the step).
GridPath sample_path_grid(const LevyModel& m, double h, double horizon, RngStream& rng,
                          double start = 0.0);

/// First time the path is at or below `level`; nullopt when not reached.
std::optional<double> first_passage_below(const EventPath& p, double level);
std::optional<double> first_passage_below(const GridPath& p, double level);

/// T_{-x} for a path started at 0.
std::optional<double> first_passage(const EventPath& p, double x);
std::optional<double> first_passage(const GridPath& p, double x);
std::optional<double> first_passage(const Path& p, double x);

enum class ExcursionKind { AboveInfimum, BelowSupremum };

struct Excursion {
    Path path;
    ExcursionKind kind = ExcursionKind::AboveInfimum;
    /// Local time at which the excursion starts: -I (above infimum) or S (below supremum),
    /// measured from the start value of the parent path.
    double start_local_time = 0.0;
    /// Opening time g in the parent path.
    double start_time = 0.0;
    /// Level I_g (or S_g) of the parent path at the opening time.
    double level = 0.0;
    bool terminated = true;
    bool approximate = false;

    /// The exact path; throws if the excursion was extracted from a grid.
    const EventPath& event_path() const;
};

/// Excursions of X - I away from 0, in time order. The last one is flagged
/// unterminated when the path ends inside it.
std::vector<Excursion> extract_excursions(const EventPath& p);
std::vector<Excursion> extract_excursions(const GridPath& p);
std::vector<Excursion> extract_excursions(const Path& p);

/// Excursions of X - S away from 0 (nonpositive, final jump recorded).
std::vector<Excursion> extract_sup_excursions(const EventPath& p);

struct AnyExcursion {};
struct LifetimeAtLeast {
    double delta;
};
struct HeightAtLeast {
    double height;
};
using ExcursionCondition = std::variant<AnyExcursion, LifetimeAtLeast, HeightAtLeast>;

bool satisfies(const Path& p, const ExcursionCondition& c);

struct ExcursionOptions {
    SimLimits limits{};
    /// Grid step for models with a Gaussian part.
    double grid_h = 1e-3;
};

/// Draw from n(· | condition) by streaming excursions of X - I.
Excursion sample_excursion(const LevyModel& m, const ExcursionCondition& condition, RngStream& rng,
                           const ExcursionOptions& options = {});

/// One Bernoulli draw of {T_0 < T_a} for the process started at x.
bool two_sided_exit(const LevyModel& m, double x, double a, RngStream& rng,
                    const SimLimits& limits = {});

/// k_{T_{-x}} ε for the first excursion of X - S that reaches depth x; this is
/// an exact draw of the killed excursion under n̄(· | T_{-x} < ∞).
EventPath sample_sup_excursion_to_depth(const LevyModel& m, double x, RngStream& rng,
                                        const SimLimits& limits = {});

}  // namespace splp

#endif  // SPLP_SIMULATE_HPP
