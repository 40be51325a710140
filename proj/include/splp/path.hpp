#ifndef SPLP_PATH_HPP
#define SPLP_PATH_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace splp {

/// Absolute tolerance used for equality of reals on paths (knot snapping,
/// segment merging, jump clean-up).
inline constexpr double kPathTol = 1e-12;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// One drift piece of an EventPath: linear with the given slope for
/// `duration` time units, followed by a jump of `end_jump` at its right end.
struct Segment {
    double duration = 0.0;
    double slope = 0.0;
    double end_jump = 0.0;
};

enum class JumpSign { Upward, Downward };

/**
 * Exact piecewise-linear càdlàg path: drift segments separated by jumps.
 *
 * The path is described by its value at time 0 (after the time-0 jump, if
 * any), the size of that time-0 jump, and an ordered list of segments. The
 * pre-jump start value `x0 - initial_jump` is kept so that rotation can
 * move the time-0 jump to the end of the reversed path and back.
 *
 * Paths are immutable. Construction validates that every jump has the sign
 * prescribed by `sign` (upward for spectrally positive paths), drops jumps
 * smaller than kPathTol, and merges adjacent segments of equal slope that are
 * not separated by a jump, so that equal paths have equal representations.
 */
class EventPath {
public:
    EventPath() = default;
    EventPath(double x0, double initial_jump, std::vector<Segment> segments,
              JumpSign sign = JumpSign::Upward, bool finite = true);

    /// Path that starts at `x0` with no initial jump.
    static EventPath starting_at(double x0, std::vector<Segment> segments);
    static EventPath constant(double value);

    double x0() const { return x0_; }
    double initial_jump() const { return initial_jump_; }
    /// Value before the time-0 jump.
    double start_value() const { return x0_ - initial_jump_; }
    const std::vector<Segment>& segments() const { return segments_; }
    JumpSign sign() const { return sign_; }
    /// False when the path stands for an unkilled process known up to a horizon.
    bool finite() const { return finite_; }

    double lifetime() const { return knots_.back(); }
    double end_value() const { return starts_.back(); }
    double final_jump() const;

    /// Knot times 0 = t_0 < t_1 < ... < t_n = lifetime.
    const std::vector<double>& knots() const { return knots_; }
    /// Value right after knot i (post-jump).
    double value_after_knot(std::size_t i) const { return starts_[i]; }
    /// Left limit at knot i >= 1 (end of segment i-1 before its jump).
    double value_before_knot(std::size_t i) const;

    double evaluate(double t) const;
    /// Left limit; at t = 0 returns evaluate(0) (convention ω(0-) = ω(0)).
    double left_limit(double t) const;

    /// Every nonzero jump, the time-0 jump included, in time order.
    std::vector<double> jumps() const;
    std::vector<double> jump_times() const;
    double total_variation() const;
    double sup() const;
    double inf() const;
    /// ∫_0^V ω(s) ds.
    double area() const;

    EventPath translated(double c) const;
    /// c - ω, a path with jumps of the opposite sign.
    EventPath reflected(double c) const;
    EventPath as_unkilled() const;

    /// Index i of the knot equal to t within tolerance, if any.
    std::optional<std::size_t> knot_index(double t) const;

private:
    void canonicalize();
    /// Segment index containing t in its half-open interval [t_i, t_{i+1}).
    std::size_t locate(double t) const;
    double tol() const;

    double x0_ = 0.0;
    double initial_jump_ = 0.0;
    std::vector<Segment> segments_;
    JumpSign sign_ = JumpSign::Upward;
    bool finite_ = true;
    std::vector<double> knots_{0.0};
    std::vector<double> starts_{0.0};
};

bool approx_equal(const EventPath& a, const EventPath& b, double tol = 1e-9);

/// Incremental construction of an EventPath from drift stretches and jumps.
class PathBuilder {
public:
    /// Path whose pre-jump start value is `start`.
    explicit PathBuilder(double start = 0.0) : x0_(start), value_(start) {}

    void drift(double duration, double slope);
    void jump(double size);

    double value() const { return value_; }
    double elapsed() const { return elapsed_; }
    bool empty() const { return segments_.empty() && initial_jump_ == 0.0; }
    std::size_t segment_count() const { return segments_.size(); }

    EventPath build(JumpSign sign = JumpSign::Upward, bool finite = true) const;

private:
    double x0_;
    double initial_jump_ = 0.0;
    double value_;
    double elapsed_ = 0.0;
    std::vector<Segment> segments_;
};

/// Sampled path v_k ≈ ω(kh), read as a step function on the grid.
class GridPath {
public:
    GridPath(double h, std::vector<double> values);

    double h() const { return h_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t last_index() const { return values_.size() - 1; }
    double lifetime() const { return h_ * static_cast<double>(last_index()); }

    std::size_t index_of(double t) const;
    double evaluate(double t) const;
    double left_limit(double t) const;
    double sup() const;
    double inf() const;

    GridPath translated(double c) const;

private:
    double h_;
    std::vector<double> values_;
};

using Path = std::variant<EventPath, GridPath>;

double lifetime(const Path& p);
double evaluate(const Path& p, double t);
double left_limit(const Path& p, double t);

/// k_s: stopped at time s, keeping the value ω(s) (jump at s included).
EventPath kill(const EventPath& p, double s);
GridPath kill(const GridPath& p, double s);
Path kill(const Path& p, double s);

/// θ_s: t ↦ ω(s+t).
EventPath shift(const EventPath& p, double s);
GridPath shift(const GridPath& p, double s);
Path shift(const Path& p, double s);

/// θ'_s: t ↦ ω(s+t) - ω(s).
EventPath shift_centered(const EventPath& p, double s);
GridPath shift_centered(const GridPath& p, double s);
Path shift_centered(const Path& p, double s);

/// ρ: t ↦ ω(V) - ω((V-t)-) with ω(0-) the pre-jump start value.
///
/// The jump at V becomes the time-0 jump of the result and the time-0 jump
/// becomes its final jump, so ρ∘ρ is the identity on paths whose pre-jump
/// start value is 0.
EventPath rotate(const EventPath& p);
/// Index-wise rotation r_k = v_N - v_{N-k}.
GridPath rotate(const GridPath& p);
Path rotate(const Path& p);

/// ρ_s taken as ρ∘k_s.
EventPath rotate_at(const EventPath& p, double s);
Path rotate_at(const Path& p, double s);

/// [ω1, ω2]: ω1 on [0, V1], then ω2(t - V1). The difference ω2(0) - ω1(V1) is
/// recorded as a jump at V1.
EventPath concat(const EventPath& p1, const EventPath& p2);
GridPath concat(const GridPath& p1, const GridPath& p2);
Path concat(const Path& p1, const Path& p2);

struct TimeValue {
    double time;
    double value;
};

/// Smallest t with ω(t) = sup ω (post-jump values count).
TimeValue first_argmax(const EventPath& p);
TimeValue first_argmax(const GridPath& p);
TimeValue first_argmax(const Path& p);

/// Largest t with ω(t-) = inf ω.
TimeValue last_arginf(const EventPath& p);
TimeValue last_arginf(const GridPath& p);
TimeValue last_arginf(const Path& p);

/// Smallest t with ω(t-) equal to the overall infimum of left limits.
TimeValue first_arginf_left(const EventPath& p);

/// Sampled copy of an EventPath on the grid 0, h, 2h, ... up to its lifetime.
GridPath sample_on_grid(const EventPath& p, double h);

}  // namespace splp

#endif  // SPLP_PATH_HPP
