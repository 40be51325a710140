#include "splp/levy_model.hpp"

#include "splp/path.hpp"

#include <cmath>
#include <sstream>

namespace splp {

JumpSpec::JumpSpec(std::vector<JumpComponent> components) : components_(std::move(components)) {
    for (const auto& c : components_) {
        if (!(c.mass > 0.0) || !(c.param > 0.0) || !std::isfinite(c.mass) || !std::isfinite(c.param)) {
            throw DomainError("jump components need positive, finite mass and parameter");
        }
    }
}

JumpSpec JumpSpec::exponential(double b, double theta) {
    return JumpSpec({{JumpComponent::Family::Exponential, b, theta}});
}

JumpSpec JumpSpec::dirac(double b, double c) {
    return JumpSpec({{JumpComponent::Family::Dirac, b, c}});
}

double JumpSpec::mass() const {
    double b = 0.0;
    for (const auto& c : components_) b += c.mass;
    return b;
}

double JumpSpec::first_moment() const {
    double m = 0.0;
    for (const auto& c : components_) {
        m += c.family == JumpComponent::Family::Exponential ? c.mass / c.param : c.mass * c.param;
    }
    return m;
}

double JumpSpec::small_jump_moment() const {
    double m = 0.0;
    for (const auto& c : components_) {
        if (c.family == JumpComponent::Family::Exponential) {
            const double th = c.param;
            m += c.mass * ((1.0 - std::exp(-th)) / th - std::exp(-th));
        } else if (c.param < 1.0) {
            m += c.mass * c.param;
        }
    }
    return m;
}

double JumpSpec::tail(double z) const {
    double t = 0.0;
    for (const auto& c : components_) {
        if (c.family == JumpComponent::Family::Exponential) {
            t += z <= 0.0 ? c.mass : c.mass * std::exp(-c.param * z);
        } else if (z < c.param) {
            t += c.mass;
        }
    }
    return t;
}

double JumpSpec::laplace_integral(double lambda) const {
    double s = 0.0;
    for (const auto& c : components_) {
        if (c.family == JumpComponent::Family::Exponential) {
            s += c.mass * lambda / (lambda + c.param);
        } else {
            s += -c.mass * std::expm1(-lambda * c.param);
        }
    }
    return s;
}

double JumpSpec::sample(std::mt19937_64& engine) const {
    if (components_.empty()) throw DomainError("cannot sample from the null jump measure");
    const JumpComponent* pick = &components_.front();
    if (components_.size() > 1) {
        double u = std::uniform_real_distribution<double>(0.0, mass())(engine);
        for (const auto& c : components_) {
            pick = &c;
            if (u < c.mass) break;
            u -= c.mass;
        }
    }
    if (pick->family == JumpComponent::Family::Dirac) return pick->param;
    return std::exponential_distribution<double>(pick->param)(engine);
}

std::string to_string(Criticality c) {
    switch (c) {
        case Criticality::Subcritical: return "subcritical";
        case Criticality::Critical: return "critical";
        case Criticality::Supercritical: return "supercritical";
    }
    return "unknown";
}

LevyModel::LevyModel(double alpha, double beta, JumpSpec jumps)
    : alpha_(alpha), beta_(beta), jumps_(std::move(jumps)) {
    if (!(beta_ >= 0.0) || !std::isfinite(alpha_) || !std::isfinite(beta_)) {
        throw DomainError("Gaussian coefficient must be nonnegative and coefficients finite");
    }
}

LevyModel LevyModel::from_drift(double d, JumpSpec jumps) {
    const double alpha = d - jumps.small_jump_moment();
    return LevyModel(alpha, 0.0, std::move(jumps));
}

double LevyModel::laplace_exponent(double lambda) const {
    if (lambda < 0.0) throw DomainError("Laplace exponent is defined for λ ≥ 0");
    // ∫(e^{-λr} - 1 + λr 1_{r<1})Π(dr) = -∫(1 - e^{-λr})Π(dr) + λ ∫_{r<1} rΠ(dr)
    return alpha_ * lambda + beta_ * lambda * lambda - jumps_.laplace_integral(lambda) +
           lambda * jumps_.small_jump_moment();
}

double LevyModel::slope_at_zero() const {
    return alpha_ + jumps_.small_jump_moment() - jumps_.first_moment();
}

double LevyModel::drift() const {
    if (!finite_variation()) throw DomainError("drift form needs a finite-variation model");
    return alpha_ + jumps_.small_jump_moment();
}

std::string LevyModel::describe() const {
    std::ostringstream os;
    os << "alpha=" << alpha_ << " beta=" << beta_;
    for (const auto& c : jumps_.components()) {
        if (c.family == JumpComponent::Family::Exponential) {
            os << " exp(b=" << c.mass << ",theta=" << c.param << ")";
        } else {
            os << " dirac(b=" << c.mass << ",c=" << c.param << ")";
        }
    }
    return os.str();
}

double laplace_exponent(const LevyModel& m, double lambda) { return m.laplace_exponent(lambda); }

DriftForm drift_form(const LevyModel& m) { return {m.drift(), m.jumps()}; }

Criticality criticality(const LevyModel& m) {
    const double s = m.slope_at_zero();
    if (std::abs(s) <= 1e-12) return Criticality::Critical;
    return s > 0.0 ? Criticality::Subcritical : Criticality::Supercritical;
}

double eta(const LevyModel& m) {
    if (criticality(m) != Criticality::Supercritical) return 0.0;
    double hi = 1.0;
    while (m.laplace_exponent(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw DomainError("ψ has no positive root below 1e12");
    }
    double lo = 0.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (m.laplace_exponent(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ScaleTable::ScaleTable(double h, std::vector<double> values) : h_(h), values_(std::move(values)) {
    if (!(h_ > 0.0) || values_.size() < 2) throw DomainError("scale table needs h > 0 and two points");
}

double ScaleTable::operator()(double x) const {
    if (x < 0.0 || x > x_max() * (1.0 + 1e-12)) {
        throw DomainError("scale function argument " + std::to_string(x) + " outside table");
    }
    const double u = x / h_;
    const auto k = std::min(static_cast<std::size_t>(u), values_.size() - 2);
    const double w = u - static_cast<double>(k);
    return (1.0 - w) * values_[k] + w * values_[k + 1];
}

namespace {

/// W(x) = (1/d)[1 + ∫_0^x W(x-z) Π̄(z) dz] marched on the grid kh, k = 0..n.
std::vector<double> volterra_trapezoid(const JumpSpec& jumps, double d, double h, std::size_t n) {
    std::vector<double> tail(n + 1);
    for (std::size_t k = 0; k <= n; ++k) tail[k] = jumps.tail(static_cast<double>(k) * h);
    std::vector<double> w(n + 1);
    w[0] = 1.0 / d;
    const double diag = 1.0 - 0.5 * h * tail[0] / d;
    for (std::size_t i = 1; i <= n; ++i) {
        double conv = 0.5 * w[0] * tail[i];
        for (std::size_t k = 1; k < i; ++k) conv += w[i - k] * tail[k];
        w[i] = (1.0 + h * conv) / d / diag;
    }
    return w;
}

}  // namespace

ScaleTable scale_function(const LevyModel& m, double x_max, double h) {
    if (!(h > 0.0) || !(x_max > 0.0)) throw DomainError("scale function needs h > 0 and x_max > 0");
    const auto n = static_cast<std::size_t>(std::ceil(x_max / h - 1e-9));
    std::vector<double> w(n + 1);

    if (!m.finite_variation()) {
        if (!m.jumps().is_null()) {
            throw UnsupportedModel("scale function with β > 0 and jumps is not supported");
        }
        const double a = m.alpha();
        const double b = m.beta();
        for (std::size_t k = 0; k <= n; ++k) {
            const double x = static_cast<double>(k) * h;
            w[k] = a == 0.0 ? x / b : -std::expm1(-a * x / b) / a;
        }
        return ScaleTable(h, std::move(w));
    }

    const double d = m.drift();
    if (!(d > 0.0)) throw DomainError("scale function needs a positive drift coefficient");
    // Trapezoid marching is second order; one Richardson step against the
    // half-step solution removes the leading h² term.
    const std::vector<double> coarse = volterra_trapezoid(m.jumps(), d, h, n);
    const std::vector<double> fine = volterra_trapezoid(m.jumps(), d, 0.5 * h, 2 * n);
    for (std::size_t k = 0; k <= n; ++k) w[k] = (4.0 * fine[2 * k] - coarse[k]) / 3.0;
    return ScaleTable(h, std::move(w));
}

double exit_probability(const ScaleTable& w, double x, double a) {
    if (!(x > 0.0) || !(x < a) || a > w.x_max() * (1.0 + 1e-12)) {
        throw DomainError("exit probability needs 0 < x < a ≤ x_max");
    }
    return w(a - x) / w(a);
}

double exit_probability(const LevyModel& m, double x, double a, double h) {
    return exit_probability(scale_function(m, a, h), x, a);
}

}  // namespace splp
