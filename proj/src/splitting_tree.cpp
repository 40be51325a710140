#include "splp/splitting_tree.hpp"

#include "splp/excursion_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace splp {

SplittingTree::SplittingTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    children_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const TreeNode& n = nodes_[i];
        if (n.id != i) throw DomainError("tree node ids must match their positions");
        if (!(n.lifespan > 0.0)) throw DomainError("lifespans must be positive");
        if (!n.parent) {
            if (i != 0 || n.birth != 0.0) throw DomainError("only node 0 may be the root, born at 0");
            continue;
        }
        const std::size_t p = *n.parent;
        if (p >= i) throw DomainError("parents must precede their children");
        if (!(n.birth > nodes_[p].birth) || !(n.birth < nodes_[p].death())) {
            throw DomainError("child born outside its parent's life");
        }
        children_[p].push_back(i);
    }
    for (auto& c : children_) {
        std::sort(c.begin(), c.end(),
                  [this](std::size_t a, std::size_t b) { return nodes_[a].birth < nodes_[b].birth; });
    }
}

double SplittingTree::total_length() const {
    double l = 0.0;
    for (const TreeNode& n : nodes_) l += n.lifespan;
    return l;
}

double SplittingTree::extinction_time() const {
    double t = 0.0;
    for (const TreeNode& n : nodes_) t = std::max(t, n.death());
    return t;
}

SplittingTree sample_tree(const JumpSpec& lifespan, std::optional<double> root_lifespan,
                          RngStream& rng, const TreeCaps& caps) {
    const double b = lifespan.mass();
    std::vector<TreeNode> nodes;
    TreeNode root;
    root.lifespan = root_lifespan ? *root_lifespan : lifespan.sample(rng.engine());
    nodes.push_back(root);
    double length = root.lifespan;

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (b <= 0.0) break;
        const double start = nodes[i].birth;
        const double end = nodes[i].death();
        double t = start + rng.exponential(b);
        while (t < end) {
            TreeNode child;
            child.id = nodes.size();
            child.parent = i;
            child.birth = t;
            child.lifespan = lifespan.sample(rng.engine());
            length += child.lifespan;
            nodes.push_back(child);
            if (nodes.size() > caps.max_nodes || length > caps.max_length) {
                nodes.pop_back();
                throw TruncationError("splitting tree exceeded its caps (" +
                                          std::to_string(caps.max_nodes) + " nodes)",
                                      SplittingTree(std::move(nodes)));
            }
            t += rng.exponential(b);
        }
    }
    return SplittingTree(std::move(nodes));
}

WidthProcess::WidthProcess(std::vector<double> times, std::vector<int> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size() + 1) {
        throw DomainError("width process needs one more time than values");
    }
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        if (!(times_[i] <= times_[i + 1])) throw DomainError("width times must be sorted");
        if (values_[i] < 0) throw DomainError("width values must be nonnegative");
    }
}

int WidthProcess::value(double t) const {
    if (times_.empty() || t < times_.front() || t >= times_.back()) return 0;
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

int WidthProcess::left_limit(double t) const {
    if (times_.empty() || t > times_.back()) return 0;
    if (t <= times_.front()) return value(t);
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double WidthProcess::integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * (times_[i + 1] - times_[i]);
    return s;
}

double WidthProcess::time_weighted_integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double a = times_[i];
        const double b = times_[i + 1];
        s += values_[i] * 0.5 * (b * b - a * a);
    }
    return s;
}

WidthProcess width_process(const SplittingTree& t) {
    struct Event {
        double time;
        int delta;
    };
    std::vector<Event> events;
    events.reserve(2 * t.size());
    for (const TreeNode& n : t.nodes()) {
        events.push_back({n.birth, +1});
        events.push_back({n.death(), -1});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return a.time < b.time || (a.time == b.time && a.delta > b.delta);
    });
    std::vector<double> times;
    std::vector<int> values;
    int level = 0;
    for (std::size_t i = 0; i < events.size();) {
        const double now = events[i].time;
        while (i < events.size() && events[i].time == now) level += events[i++].delta;
        if (!values.empty() && values.back() == level) continue;
        times.push_back(now);
        if (level > 0) values.push_back(level);
    }
    // `times` ends with the extinction time, at which the population reaches 0.
    return WidthProcess(std::move(times), std::move(values));
}

WidthProcess reverse(const WidthProcess& w) {
    const auto& ts = w.times();
    const auto& vs = w.values();
    const double end = w.extinction_time();
    std::vector<double> times;
    std::vector<int> values;
    times.reserve(ts.size());
    values.reserve(vs.size());
    for (std::size_t r = 0; r < vs.size(); ++r) {
        const std::size_t i = vs.size() - 1 - r;
        times.push_back(end - ts[i + 1]);
        values.push_back(vs[i]);
    }
    times.push_back(end - ts.front());
    return WidthProcess(std::move(times), std::move(values));
}

EventPath jccp(const SplittingTree& t) {
    PathBuilder path(0.0);
    if (t.size() == 0) return path.build();
    path.jump(t.nodes()[0].lifespan);
    double level = t.nodes()[0].death();

    struct Frame {
        std::size_t node;
        std::size_t remaining;  // children not yet visited, taken from the back
    };
    std::vector<Frame> stack{{0, t.children(0).size()}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.remaining == 0) {
            stack.pop_back();
            continue;
        }
        const std::size_t c = t.children(f.node)[--f.remaining];
        const TreeNode& child = t.nodes()[c];
        path.drift(level - child.birth, -1.0);
        path.jump(child.lifespan);
        level = child.death();
        stack.push_back({c, t.children(c).size()});
    }
    path.drift(level, -1.0);
    return path.build();
}

namespace {

StepFunction merge_steps(std::vector<double> bp, std::vector<int> values) {
    StepFunction out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(bp[i + 1] > bp[i])) continue;
        if (!out.values.empty() && out.values.back() == values[i]) {
            out.breakpoints.back() = bp[i + 1];
            continue;
        }
        if (out.breakpoints.empty()) out.breakpoints.push_back(bp[i]);
        out.breakpoints.push_back(bp[i + 1]);
        out.values.push_back(values[i]);
    }
    return out;
}

}  // namespace

StepFunction normalized(const WidthProcess& w) {
    return merge_steps(w.times(), w.values());
}

StepFunction normalized_counts(const EventPath& contour) {
    const LocalTimeProfile prof = local_time_fv(contour);
    return merge_steps(prof.breakpoints, prof.counts);
}

bool contour_width_identity(const SplittingTree& t, double tol) {
    const StepFunction a = normalized_counts(jccp(t));
    const StepFunction b = normalized(width_process(t));
    if (a.values != b.values || a.breakpoints.size() != b.breakpoints.size()) return false;
    for (std::size_t i = 0; i < a.breakpoints.size(); ++i) {
        const double scale = std::max(1.0, std::abs(b.breakpoints[i]));
        if (std::abs(a.breakpoints[i] - b.breakpoints[i]) > tol * scale) return false;
    }
    return true;
}

}  // namespace splp
