#pragma once

#include <optional>
#include <vector>

#include "cdcp/model.hpp"

namespace cdcp {

struct SimPath;  // simulate.hpp

enum class RegimeType { Type1, Type2, Type3 };

struct Regime {
    RegimeType type = RegimeType::Type1;
    std::optional<double> t_star;  // Type2 only: horizon where B(t) reaches alpha
};

// Solved trajectory of the martingale ODE B'(t) = f1(B(t)), B(0) = b, on a
// uniform grid. Strictly increasing and bounded by b_plus.
struct BCurve {
    std::vector<double> grid;    // 0 = t_0 < ... < t_n = T
    std::vector<double> values;  // B(t_i)
    double b = 0.0;
    double b_plus = 0.0;
    Regime regime;

    double horizon() const { return grid.back(); }
    // monotone piecewise-linear interpolation
    double at(double t) const;
};

// K(t) on the same grid as a BCurve, K(0) = 0.
struct KCurve {
    std::vector<double> grid;
    std::vector<double> values;
    double at(double t) const;
};

// f1(B) = delta*B - theta*jhat(nu)*(ghat(-B) - 1); the autonomous RHS of the
// B ODE once phi = -(theta*jhat(nu) - 1) is substituted.
double f1(double B, const PhysicalModel& m, const EsscherParams& e);

// Smallest positive root of f1. Exponential-G closed form beta - theta*jhat/delta
// cross-checked against bracketed bisection; generic case bisection only.
double b_plus(const PhysicalModel& m, const EsscherParams& e);

// Bracketed-bisection route to the same root, kept public as the independent
// cross-check of the closed form.
double b_plus_bisection(const PhysicalModel& m, const EsscherParams& e);

// G-function: time at which the B ODE started from b reaches B, i.e.
// integral of 1/f1 over [b, B]. Strictly increasing; domain b <= B < b_plus.
double g_of_B(double B, const PhysicalModel& m, const EsscherParams& e);

// RK4 on a uniform grid of n_grid+1 points, self-checked against the
// G-function inverse identity on the full grid (tolerance identity_tol).
BCurve solve_B(const PhysicalModel& m, const EsscherParams& e, double T,
               std::size_t n_grid = 2000, double identity_tol = 1e-6);

Regime classify_regime(const PhysicalModel& m, const EsscherParams& e,
                       const BCurve& bcurve);

// K(t) = -a*delta*int_0^t B + rho*int_0^t [1 - psi*hhat(-B)], composite
// Simpson over the B grid.
KCurve solve_K(const PhysicalModel& m, const EsscherParams& e,
               const BCurve& bcurve);

// Which dynamics a TiltedModel presents for simulation/moments:
//   LambdaTilde: the scaled intensity process itself is the event rate; level,
//     external rate and jump laws are the corollary's time-varying transforms.
//   Lambda: keep the physical-state dynamics and multiply the event rate by
//     c(t) = theta*jhat(nu)*ghat(-B(t)); jump laws tilted but unscaled.
// LambdaTilde is canonical: it is the process whose first moments match the
// tilted-mean formulas and the published reference estimates.
enum class TiltRepresentation { LambdaTilde, Lambda };

struct StationarityReport {
    bool holds_full = true;     // delta > sup_t c(t)/(beta - B(t)), full jhat
    bool holds_displayed = true;  // same with single-power claim factor
    double worst_margin_full = 0.0;
    double worst_margin_displayed = 0.0;
};

// Time-inhomogeneous model under the tilted measure. Immutable; all
// time-varying quantities are derived from the stored BCurve.
class TiltedModel {
public:
    TiltedModel(PhysicalModel base, EsscherParams esscher, BCurve bcurve,
                TiltRepresentation rep = TiltRepresentation::LambdaTilde);

    const PhysicalModel& base() const { return base_; }
    const EsscherParams& esscher() const { return esscher_; }
    const BCurve& bcurve() const { return bcurve_; }
    TiltRepresentation representation() const { return rep_; }

    double horizon() const { return bcurve_.horizon(); }

    // dimensionless event-rate multiplier c(t) = theta*jhat(nu)*ghat(-B(t))
    double rate_multiplier(double t) const;
    // external arrival rate psi*hhat(-B(t))*rho
    double external_rate(double t) const;
    // mean-reversion level: c(t)*a in LambdaTilde representation, a in Lambda
    double level(double t) const;

    // jump laws at time t in the active representation
    JumpDist external_jumps(double t) const;
    JumpDist self_jumps(double t) const;
    JumpDist claims() const { return claims_; }

    double claim_mean() const { return claims_.mean(); }

    TiltedModel with_representation(TiltRepresentation rep) const;

    StationarityReport stationarity() const;

private:
    PhysicalModel base_;
    EsscherParams esscher_;
    BCurve bcurve_;
    TiltRepresentation rep_;
    JumpDist claims_;
    double theta_jhat_;
};

// Validates regime/horizon compatibility and B(t) < min(alpha, beta), then
// assembles the tilted model. Throws HorizonExceedsRegime for Type-2 horizons
// past t_star and for Type-3 settings.
TiltedModel tilt_model(const PhysicalModel& m, const EsscherParams& e,
                       const BCurve& bcurve);

// e^{K(t)} theta^{N_t} e^{B(t) lambda_t} e^{-nu C_t} e^{phi Lambda_t} psi^{M_t}
// evaluated on a physical-measure path, phi = -(theta jhat(nu) - 1). Mean over
// paths is constant in t (equal to its t=0 value e^{b*lambda0}); dividing by
// that value gives the density process. Throws Overflow if the exponent
// leaves double range; use log_martingale_statistic then.
double martingale_statistic(const SimPath& path, const PhysicalModel& m,
                            const EsscherParams& e, const BCurve& bcurve,
                            const KCurve& kcurve, double t);
double log_martingale_statistic(const SimPath& path, const PhysicalModel& m,
                                const EsscherParams& e, const BCurve& bcurve,
                                const KCurve& kcurve, double t);

}  // namespace cdcp
