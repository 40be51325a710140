#ifndef SPLP_SPLITTING_TREE_HPP
#define SPLP_SPLITTING_TREE_HPP

#include "splp/levy_model.hpp"
#include "splp/path.hpp"
#include "splp/rng.hpp"
#include "splp/simulate.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace splp {

struct TreeNode {
    std::size_t id = 0;
    std::optional<std::size_t> parent;
    double birth = 0.0;
    double lifespan = 0.0;

    double death() const { return birth + lifespan; }
};

/// Chronological tree: node 0 is the root, born at time 0. Nodes are stored
/// in breadth-first order and every child is born strictly inside its
/// parent's life.
class SplittingTree {
public:
    SplittingTree() = default;
    explicit SplittingTree(std::vector<TreeNode> nodes);

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    /// Children of node i, sorted by birth time.
    const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
    /// ℓ = Σ lifespans.
    double total_length() const;
    double extinction_time() const;

private:
    std::vector<TreeNode> nodes_;
    std::vector<std::vector<std::size_t>> children_;
};

struct TreeCaps {
    std::size_t max_nodes = 1'000'000;
    double max_length = 1e7;
};

/// Raised when a tree outgrows its caps; carries the nodes generated so far.
class TruncationError : public ResourceCapError {
public:
    TruncationError(const std::string& what, SplittingTree partial)
        : ResourceCapError(what), partial_(std::move(partial)) {}
    const SplittingTree& partial() const { return partial_; }

private:
    SplittingTree partial_;
};

/// Individuals live for i.i.d. lifespans drawn from Π/b and give birth at
/// rate b = Π mass during their lives. The root lifespan is drawn from Π/b
/// unless given.
SplittingTree sample_tree(const JumpSpec& lifespan, std::optional<double> root_lifespan,
                          RngStream& rng, const TreeCaps& caps = {});

/// Right-continuous integer step function ξ; values[i] holds on
/// [times[i], times[i+1]) and 0 from the extinction time on.
class WidthProcess {
public:
    WidthProcess() = default;
    WidthProcess(std::vector<double> times, std::vector<int> values);

    const std::vector<double>& times() const { return times_; }
    const std::vector<int>& values() const { return values_; }
    double extinction_time() const { return times_.empty() ? 0.0 : times_.back(); }

    int value(double t) const;
    int left_limit(double t) const;
    /// ∫ ξ_t dt.
    double integral() const;
    /// ∫ t ξ_t dt.
    double time_weighted_integral() const;

private:
    /// times_ has one more entry than values_; the last is the extinction time.
    std::vector<double> times_;
    std::vector<int> values_;
};

/// Population size: births before deaths at equal times.
WidthProcess width_process(const SplittingTree& t);

/// s ↦ ξ((T_Ext - s)-).
WidthProcess reverse(const WidthProcess& w);

/// Jumping chronological contour: slope -1, a jump of the child's lifespan at
/// each birth level, visiting births of an individual from its death
/// downwards and recursing into each child before resuming.
EventPath jccp(const SplittingTree& t);

/// Normalized step function (breakpoints, values on the open intervals
/// between them) with equal neighbours merged.
struct StepFunction {
    std::vector<double> breakpoints;
    std::vector<int> values;
};
StepFunction normalized(const WidthProcess& w);
StepFunction normalized_counts(const EventPath& contour);

/// True iff the crossing counts of jccp(t) and width_process(t) agree as step
/// functions (breakpoints within 1e-12).
bool contour_width_identity(const SplittingTree& t, double tol = 1e-12);

}  // namespace splp

#endif  // SPLP_SPLITTING_TREE_HPP
