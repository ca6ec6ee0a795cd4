#pragma once

#include <functional>

#include "cdcp/esscher.hpp"
#include "cdcp/model.hpp"

namespace cdcp {

enum class MomentMethod { ClosedForm, Quadrature };

struct MomentReport {
    double t = 0.0;
    double mean_lambda = 0.0;
    double mean_N = 0.0;
    double mean_C = 0.0;
    Measure measure = Measure::P;
    MomentMethod method = MomentMethod::ClosedForm;
};

// Time-homogeneous closed forms under the physical measure. The kappa = 0
// branch is taken when |kappa| < 1e-12.
double mean_lambda_P(double t, const PhysicalModel& m);
double mean_N_P(double t, const PhysicalModel& m);
double mean_C_P(double t, const PhysicalModel& m);

MomentReport moments_P(double t, const PhysicalModel& m);

// Time-inhomogeneous parameter functions, Riemann-integrable on [0, t].
struct TimeVaryingParams {
    double lambda0 = 0.0;
    double delta = 1.0;
    std::function<double(double)> rho;
    std::function<double(double)> mu_H;
    std::function<double(double)> a;
    std::function<double(double)> mu_G;
    double mu_J = 1.0;
};

// Nested-quadrature evaluation of the inhomogeneous first moments
// (cumulative integral of kappa cached on a shared grid, refined until
// successive estimates agree to rel_tol).
double mean_lambda_inhom(double t, const TimeVaryingParams& p,
                         double rel_tol = 1e-8);
double mean_N_inhom(double t, const TimeVaryingParams& p,
                    double rel_tol = 1e-8);
double mean_C_inhom(double t, const TimeVaryingParams& p,
                    double rel_tol = 1e-8);

// The tilted model's parameter functions in the scaled representation; feeds
// the inhomogeneous machinery and the direct tilted-mean route below.
TimeVaryingParams tilted_params(const TiltedModel& tm);

// Mean of the scaled intensity under the tilted measure: linear ODE with
// decay I(s) = delta - c(s)/(beta - B(s)) and forcing
// c(s) * (psi*alpha*rho/(alpha - B(s))^2 + a*delta), initial value lambda0.
// Integrated by RK4 on a refined grid -- an independent route from
// mean_lambda_inhom's exponential-integral quadrature.
double mean_lambda_star(double t, const TiltedModel& tm, double rel_tol = 1e-8);
double mean_N_star(double t, const TiltedModel& tm, double rel_tol = 1e-8);
double mean_C_star(double t, const TiltedModel& tm, double rel_tol = 1e-8);

MomentReport moments_star(double t, const TiltedModel& tm);

}  // namespace cdcp
