#ifndef SPLP_LEVY_MODEL_HPP
#define SPLP_LEVY_MODEL_HPP

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace splp {

class UnsupportedModel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One atom of the parametric jump catalog.
///   Exponential: Π(dr) = b θ e^{-θ r} dr   (param = θ)
///   Dirac:       Π = b δ_c                 (param = c)
struct JumpComponent {
    enum class Family { Exponential, Dirac };
    Family family;
    double mass;   // b
    double param;  // θ or c
};

/// Finite Lévy (or lifespan) measure from the catalog. An empty component
/// list is the null measure; several components form a finite mixture.
class JumpSpec {
public:
    JumpSpec() = default;
    explicit JumpSpec(std::vector<JumpComponent> components);

    static JumpSpec null() { return {}; }
    static JumpSpec exponential(double b, double theta);
    static JumpSpec dirac(double b, double c);

    const std::vector<JumpComponent>& components() const { return components_; }
    bool is_null() const { return components_.empty(); }

    /// Total mass b = Π((0,∞)).
    double mass() const;
    /// m = ∫ r Π(dr).
    double first_moment() const;
    /// ∫_{(0,1)} r Π(dr).
    double small_jump_moment() const;
    /// Π̄(z) = Π((z,∞)).
    double tail(double z) const;
    /// ∫ (1 - e^{-λr}) Π(dr).
    double laplace_integral(double lambda) const;
    /// Draw from Π / mass.
    double sample(std::mt19937_64& engine) const;

private:
    std::vector<JumpComponent> components_;
};

enum class Criticality { Subcritical, Critical, Supercritical };

std::string to_string(Criticality c);

/**
 * Spectrally positive Lévy process given by its Lévy–Khintchine triple:
 *
 *   ψ(λ) = αλ + βλ² + ∫ (e^{-λr} - 1 + λr 1_{r<1}) Π(dr),
 *
 * with E[e^{-λX_t}] = e^{tψ(λ)}. Every catalog measure has finite mass, so
 * the process has finite variation exactly when β = 0, and then
 * ψ(λ) = dλ - ∫ (1 - e^{-λr}) Π(dr) with drift coefficient d = α + ∫_{r<1} rΠ(dr):
 * the paths decrease at speed d between upward jumps.
 */
class LevyModel {
public:
    LevyModel(double alpha, double beta, JumpSpec jumps);

    /// Model in drift form: ψ(λ) = dλ - ∫(1 - e^{-λr}) Π(dr).
    static LevyModel from_drift(double d, JumpSpec jumps);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const JumpSpec& jumps() const { return jumps_; }

    bool finite_variation() const { return beta_ == 0.0; }

    double laplace_exponent(double lambda) const;
    /// ψ'(0+).
    double slope_at_zero() const;

    /// Drift coefficient d of the drift form; throws for infinite variation.
    double drift() const;
    /// Drift of the paths: X_t = -d·t + √(2β) B_t + (jumps).
    double path_drift() const { return -(alpha_ + jumps_.small_jump_moment()); }

    std::string describe() const;

private:
    double alpha_;
    double beta_;
    JumpSpec jumps_;
};

double laplace_exponent(const LevyModel& m, double lambda);

struct DriftForm {
    double d;
    JumpSpec jumps;
};
DriftForm drift_form(const LevyModel& m);

Criticality criticality(const LevyModel& m);

/// Largest root of ψ, found by bisection (absolute tolerance 1e-10).
double eta(const LevyModel& m);

/// W on the grid 0, h, 2h, ..., x_max.
class ScaleTable {
public:
    ScaleTable(double h, std::vector<double> values);

    double h() const { return h_; }
    double x_max() const { return h_ * static_cast<double>(values_.size() - 1); }
    const std::vector<double>& values() const { return values_; }

    /// Linear interpolation on the grid.
    double operator()(double x) const;

private:
    double h_;
    std::vector<double> values_;
};

/// Scale function with ∫ e^{-λx} W(x) dx = 1/ψ(λ).
///
/// Finite variation: trapezoid marching of the renewal equation, with one
/// Richardson step against a half-step solve, of
///   W(x) = (1/d) [1 + ∫_0^x W(x - z) Π̄(z) dz].
/// β > 0 without jumps: closed form. β > 0 with jumps is not supported.
ScaleTable scale_function(const LevyModel& m, double x_max, double h);

/// P_x(T_0 < T_a) = W(a - x) / W(a).
double exit_probability(const ScaleTable& w, double x, double a);
double exit_probability(const LevyModel& m, double x, double a, double h = 1e-3);

}  // namespace splp

#endif  // SPLP_LEVY_MODEL_HPP
