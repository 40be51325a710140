#include "splp/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace splp {

namespace {

bool wrong_sign(double jump, JumpSign sign) {
    return sign == JumpSign::Upward ? jump < 0.0 : jump > 0.0;
}

double clean_jump(double jump, JumpSign sign) {
    if (std::abs(jump) <= kPathTol) return 0.0;
    if (wrong_sign(jump, sign)) {
        throw DomainError("jump of size " + std::to_string(jump) +
                          " has the wrong sign for this path");
    }
    return jump;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

// ---------------------------------------------------------------- EventPath

EventPath::EventPath(double x0, double initial_jump, std::vector<Segment> segments,
                     JumpSign sign, bool finite)
    : x0_(x0), initial_jump_(initial_jump), segments_(std::move(segments)), sign_(sign),
      finite_(finite) {
    canonicalize();
}

EventPath EventPath::starting_at(double x0, std::vector<Segment> segments) {
    return EventPath(x0, 0.0, std::move(segments));
}

EventPath EventPath::constant(double value) { return EventPath(value, 0.0, {}); }

void EventPath::canonicalize() {
    if (!std::isfinite(x0_) || !std::isfinite(initial_jump_)) {
        throw DomainError("path start is not finite");
    }
    initial_jump_ = clean_jump(initial_jump_, sign_);

    std::vector<Segment> out;
    out.reserve(segments_.size());
    for (const Segment& raw : segments_) {
        if (!(raw.duration >= 0.0) || !std::isfinite(raw.duration) || !std::isfinite(raw.slope)) {
            throw DomainError("segment durations must be finite and positive");
        }
        Segment s = raw;
        s.end_jump = clean_jump(s.end_jump, sign_);
        if (s.duration <= kPathTol) {
            // Degenerate piece: keep its displacement and jump on the previous knot.
            const double carry = s.slope * s.duration + s.end_jump;
            if (out.empty()) {
                initial_jump_ = clean_jump(initial_jump_ + carry, sign_);
                x0_ += carry;
            } else {
                out.back().end_jump = clean_jump(out.back().end_jump + carry, sign_);
            }
            continue;
        }
        if (!out.empty() && out.back().end_jump == 0.0 &&
            std::abs(out.back().slope - s.slope) <= kPathTol) {
            Segment& prev = out.back();
            const double total = prev.duration + s.duration;
            prev.slope = (prev.slope * prev.duration + s.slope * s.duration) / total;
            prev.duration = total;
            prev.end_jump = s.end_jump;
            continue;
        }
        out.push_back(s);
    }
    segments_ = std::move(out);

    knots_.assign(1, 0.0);
    starts_.assign(1, x0_);
    knots_.reserve(segments_.size() + 1);
    starts_.reserve(segments_.size() + 1);
    for (const Segment& s : segments_) {
        knots_.push_back(knots_.back() + s.duration);
        starts_.push_back(starts_.back() + s.slope * s.duration + s.end_jump);
    }
}

double EventPath::tol() const { return kPathTol * std::max(1.0, lifetime()); }

double EventPath::final_jump() const {
    return segments_.empty() ? initial_jump_ : segments_.back().end_jump;
}

double EventPath::value_before_knot(std::size_t i) const {
    if (i == 0) return x0_;
    return starts_[i] - segments_[i - 1].end_jump;
}

std::optional<std::size_t> EventPath::knot_index(double t) const {
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
    const double eps = tol();
    if (it != knots_.end() && std::abs(*it - t) <= eps) {
        return static_cast<std::size_t>(it - knots_.begin());
    }
    if (it != knots_.begin() && std::abs(*(it - 1) - t) <= eps) {
        return static_cast<std::size_t>(it - knots_.begin() - 1);
    }
    return std::nullopt;
}

std::size_t EventPath::locate(double t) const {
    if (t < -tol() || t > lifetime() + tol()) {
        throw DomainError("time " + std::to_string(t) + " outside [0, " +
                          std::to_string(lifetime()) + "]");
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

double EventPath::evaluate(double t) const {
    const std::size_t i = locate(t);
    if (auto k = knot_index(t)) return starts_[*k];
    return starts_[i] + segments_[i].slope * (t - knots_[i]);
}

double EventPath::left_limit(double t) const {
    const std::size_t i = locate(t);
    if (auto k = knot_index(t)) return value_before_knot(*k);
    return starts_[i] + segments_[i].slope * (t - knots_[i]);
}

std::vector<double> EventPath::jumps() const {
    std::vector<double> out;
    if (initial_jump_ != 0.0) out.push_back(initial_jump_);
    for (const Segment& s : segments_) {
        if (s.end_jump != 0.0) out.push_back(s.end_jump);
    }
    return out;
}

std::vector<double> EventPath::jump_times() const {
    std::vector<double> out;
    if (initial_jump_ != 0.0) out.push_back(0.0);
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].end_jump != 0.0) out.push_back(knots_[i + 1]);
    }
    return out;
}

double EventPath::total_variation() const {
    double tv = std::abs(initial_jump_);
    for (const Segment& s : segments_) tv += std::abs(s.slope) * s.duration + std::abs(s.end_jump);
    return tv;
}

double EventPath::sup() const {
    double m = *std::max_element(starts_.begin(), starts_.end());
    for (std::size_t i = 1; i < knots_.size(); ++i) m = std::max(m, value_before_knot(i));
    return m;
}

double EventPath::inf() const {
    double m = *std::min_element(starts_.begin(), starts_.end());
    for (std::size_t i = 1; i < knots_.size(); ++i) m = std::min(m, value_before_knot(i));
    return m;
}

double EventPath::area() const {
    double a = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const Segment& s = segments_[i];
        a += (starts_[i] + 0.5 * s.slope * s.duration) * s.duration;
    }
    return a;
}

EventPath EventPath::translated(double c) const {
    return EventPath(x0_ + c, initial_jump_, segments_, sign_, finite_);
}

EventPath EventPath::reflected(double c) const {
    std::vector<Segment> segs = segments_;
    for (Segment& s : segs) {
        s.slope = -s.slope;
        s.end_jump = -s.end_jump;
    }
    const JumpSign flipped = sign_ == JumpSign::Upward ? JumpSign::Downward : JumpSign::Upward;
    return EventPath(c - x0_, -initial_jump_, std::move(segs), flipped, finite_);
}

EventPath EventPath::as_unkilled() const {
    return EventPath(x0_, initial_jump_, segments_, sign_, false);
}

bool approx_equal(const EventPath& a, const EventPath& b, double tol) {
    if (a.sign() != b.sign() || a.finite() != b.finite()) return false;
    if (std::abs(a.x0() - b.x0()) > tol || std::abs(a.initial_jump() - b.initial_jump()) > tol) {
        return false;
    }
    const auto& sa = a.segments();
    const auto& sb = b.segments();
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (std::abs(sa[i].duration - sb[i].duration) > tol ||
            std::abs(sa[i].slope - sb[i].slope) > tol ||
            std::abs(sa[i].end_jump - sb[i].end_jump) > tol) {
            return false;
        }
    }
    return true;
}

void PathBuilder::drift(double duration, double slope) {
    if (duration <= 0.0) return;
    segments_.push_back({duration, slope, 0.0});
    value_ += slope * duration;
    elapsed_ += duration;
}

void PathBuilder::jump(double size) {
    if (segments_.empty()) {
        initial_jump_ += size;
        x0_ += size;
    } else {
        segments_.back().end_jump += size;
    }
    value_ += size;
}

EventPath PathBuilder::build(JumpSign sign, bool finite) const {
    return EventPath(x0_, initial_jump_, segments_, sign, finite);
}

// ----------------------------------------------------------------- GridPath

GridPath::GridPath(double h, std::vector<double> values) : h_(h), values_(std::move(values)) {
    if (!(h_ > 0.0)) throw DomainError("grid step must be positive");
    if (values_.empty()) throw DomainError("grid path needs at least one sample");
}

std::size_t GridPath::index_of(double t) const {
    const double eps = 1e-9;
    if (t < -eps * h_ || t > lifetime() + eps * h_) {
        throw DomainError("time " + std::to_string(t) + " outside grid path lifetime");
    }
    const double k = std::floor(t / h_ + eps);
    return std::min(static_cast<std::size_t>(std::max(k, 0.0)), last_index());
}

double GridPath::evaluate(double t) const { return values_[index_of(t)]; }

double GridPath::left_limit(double t) const {
    const std::size_t k = index_of(t);
    const bool on_grid = std::abs(t - static_cast<double>(k) * h_) <= 1e-9 * h_;
    if (on_grid && k > 0) return values_[k - 1];
    return values_[k];
}

double GridPath::sup() const { return *std::max_element(values_.begin(), values_.end()); }
double GridPath::inf() const { return *std::min_element(values_.begin(), values_.end()); }

GridPath GridPath::translated(double c) const {
    std::vector<double> v = values_;
    for (double& x : v) x += c;
    return GridPath(h_, std::move(v));
}

// --------------------------------------------------------------- operators

double lifetime(const Path& p) {
    return std::visit([](const auto& q) { return q.lifetime(); }, p);
}

double evaluate(const Path& p, double t) {
    return std::visit([t](const auto& q) { return q.evaluate(t); }, p);
}

double left_limit(const Path& p, double t) {
    return std::visit([t](const auto& q) { return q.left_limit(t); }, p);
}

EventPath kill(const EventPath& p, double s) {
    if (s < -kPathTol) throw DomainError("kill time must be nonnegative");
    if (s >= p.lifetime() - kPathTol * std::max(1.0, p.lifetime())) return p;
    const auto& segs = p.segments();
    const auto& knots = p.knots();
    if (auto k = p.knot_index(s)) {
        return EventPath(p.x0(), p.initial_jump(),
                         std::vector<Segment>(segs.begin(), segs.begin() + *k), p.sign());
    }
    const auto i = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), s) -
                                            knots.begin()) - 1;
    std::vector<Segment> out(segs.begin(), segs.begin() + i);
    out.push_back({s - knots[i], segs[i].slope, 0.0});
    return EventPath(p.x0(), p.initial_jump(), std::move(out), p.sign());
}

GridPath kill(const GridPath& p, double s) {
    if (s < 0.0) throw DomainError("kill time must be nonnegative");
    if (s >= p.lifetime()) return p;
    const std::size_t k = p.index_of(s);
    return GridPath(p.h(), std::vector<double>(p.values().begin(), p.values().begin() + k + 1));
}

Path kill(const Path& p, double s) {
    return std::visit([s](const auto& q) -> Path { return kill(q, s); }, p);
}

EventPath shift(const EventPath& p, double s) {
    const double value = p.evaluate(s);  // validates s
    const auto& segs = p.segments();
    const auto& knots = p.knots();
    if (auto k = p.knot_index(s)) {
        return EventPath(value, 0.0, std::vector<Segment>(segs.begin() + *k, segs.end()), p.sign(),
                         p.finite());
    }
    const auto i = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), s) -
                                            knots.begin()) - 1;
    std::vector<Segment> out;
    out.reserve(segs.size() - i);
    out.push_back({knots[i + 1] - s, segs[i].slope, segs[i].end_jump});
    out.insert(out.end(), segs.begin() + i + 1, segs.end());
    return EventPath(value, 0.0, std::move(out), p.sign(), p.finite());
}

GridPath shift(const GridPath& p, double s) {
    const std::size_t k = p.index_of(s);
    return GridPath(p.h(), std::vector<double>(p.values().begin() + k, p.values().end()));
}

Path shift(const Path& p, double s) {
    return std::visit([s](const auto& q) -> Path { return shift(q, s); }, p);
}

EventPath shift_centered(const EventPath& p, double s) {
    const EventPath q = shift(p, s);
    return q.translated(-q.x0());
}

GridPath shift_centered(const GridPath& p, double s) {
    const GridPath q = shift(p, s);
    return q.translated(-q.values().front());
}

Path shift_centered(const Path& p, double s) {
    return std::visit([s](const auto& q) -> Path { return shift_centered(q, s); }, p);
}

EventPath rotate(const EventPath& p) {
    if (!p.finite()) throw DomainError("rotation needs a path with finite lifetime");
    const auto& segs = p.segments();
    const std::size_t n = segs.size();
    const double first = p.final_jump();
    std::vector<Segment> out;
    out.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = n - 1 - r;
        const double jump = i == 0 ? p.initial_jump() : segs[i - 1].end_jump;
        out.push_back({segs[i].duration, segs[i].slope, jump});
    }
    return EventPath(first, first, std::move(out), p.sign());
}

GridPath rotate(const GridPath& p) {
    const auto& v = p.values();
    const std::size_t n = p.last_index();
    std::vector<double> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out[k] = v[n] - v[n - k];
    return GridPath(p.h(), std::move(out));
}

Path rotate(const Path& p) {
    return std::visit([](const auto& q) -> Path { return rotate(q); }, p);
}

EventPath rotate_at(const EventPath& p, double s) { return rotate(kill(p, s)); }

Path rotate_at(const Path& p, double s) {
    return std::visit([s](const auto& q) -> Path { return rotate(kill(q, s)); }, p);
}

EventPath concat(const EventPath& p1, const EventPath& p2) {
    if (!p1.finite()) throw DomainError("cannot concatenate after a path with infinite lifetime");
    if (p1.sign() != p2.sign()) throw DomainError("cannot concatenate paths of opposite jump sign");
    const double junction = p2.x0() - p1.end_value();
    std::vector<Segment> segs = p1.segments();
    double x0 = p1.x0();
    double initial = p1.initial_jump();
    if (segs.empty()) {
        x0 += junction;
        initial += junction;
    } else {
        segs.back().end_jump += junction;
    }
    segs.insert(segs.end(), p2.segments().begin(), p2.segments().end());
    return EventPath(x0, initial, std::move(segs), p1.sign(), p2.finite());
}

GridPath concat(const GridPath& p1, const GridPath& p2) {
    if (std::abs(p1.h() - p2.h()) > 1e-12 * p1.h()) {
        throw DomainError("cannot concatenate grid paths with different steps");
    }
    std::vector<double> v = p1.values();
    v.insert(v.end(), p2.values().begin() + 1, p2.values().end());
    return GridPath(p1.h(), std::move(v));
}

Path concat(const Path& p1, const Path& p2) {
    return std::visit(
        overloaded{[](const EventPath& a, const EventPath& b) -> Path { return concat(a, b); },
                   [](const GridPath& a, const GridPath& b) -> Path { return concat(a, b); },
                   [](const auto&, const auto&) -> Path {
                       throw DomainError("cannot concatenate an event path with a grid path");
                   }},
        p1, p2);
}

TimeValue first_argmax(const EventPath& p) {
    const std::size_t n = p.knots().size();
    double best = p.value_after_knot(0);
    for (std::size_t i = 1; i < n; ++i) best = std::max(best, p.value_after_knot(i));
    const double eps = kPathTol * std::max(1.0, std::abs(best));
    for (std::size_t i = 0; i < n; ++i) {
        if (p.value_after_knot(i) >= best - eps) return {p.knots()[i], p.value_after_knot(i)};
    }
    return {0.0, best};
}

TimeValue first_argmax(const GridPath& p) {
    const auto& v = p.values();
    const auto it = std::max_element(v.begin(), v.end());
    return {p.h() * static_cast<double>(it - v.begin()), *it};
}

TimeValue first_argmax(const Path& p) {
    return std::visit([](const auto& q) { return first_argmax(q); }, p);
}

TimeValue last_arginf(const EventPath& p) {
    const std::size_t n = p.knots().size();
    double best = p.value_before_knot(0);
    for (std::size_t i = 1; i < n; ++i) best = std::min(best, p.value_before_knot(i));
    const double eps = kPathTol * std::max(1.0, std::abs(best));
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = n - 1 - r;
        if (p.value_before_knot(i) <= best + eps) return {p.knots()[i], p.value_before_knot(i)};
    }
    return {0.0, best};
}

TimeValue last_arginf(const GridPath& p) {
    const auto& v = p.values();
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] <= v[best]) best = k;
    }
    return {p.h() * static_cast<double>(best), v[best]};
}

TimeValue last_arginf(const Path& p) {
    return std::visit([](const auto& q) { return last_arginf(q); }, p);
}

TimeValue first_arginf_left(const EventPath& p) {
    const std::size_t n = p.knots().size();
    double best = p.value_before_knot(0);
    for (std::size_t i = 1; i < n; ++i) best = std::min(best, p.value_before_knot(i));
    const double eps = kPathTol * std::max(1.0, std::abs(best));
    for (std::size_t i = 0; i < n; ++i) {
        if (p.value_before_knot(i) <= best + eps) return {p.knots()[i], p.value_before_knot(i)};
    }
    return {0.0, best};
}

GridPath sample_on_grid(const EventPath& p, double h) {
    if (!(h > 0.0)) throw DomainError("grid step must be positive");
    const auto n = static_cast<std::size_t>(std::floor(p.lifetime() / h + 1e-9));
    std::vector<double> v(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        v[k] = p.evaluate(std::min(static_cast<double>(k) * h, p.lifetime()));
    }
    return GridPath(h, std::move(v));
}

}  // namespace splp
