#include "cdcp/moments.hpp"

#include <cmath>
#include <memory>
#include <vector>

#include "cdcp/errors.hpp"

namespace cdcp {

namespace {
constexpr double kKappaZero = 1e-12;  // branch switch threshold
}

double mean_lambda_P(double t, const PhysicalModel& m) {
    const double kappa = m.kappa();
    const double drive = m.H.mean() * m.rho + m.a * m.delta;
    if (std::abs(kappa) < kKappaZero) return m.lambda0 + drive * t;
    const double mu1 = drive / kappa;
    return mu1 + (m.lambda0 - mu1) * std::exp(-kappa * t);
}

double mean_N_P(double t, const PhysicalModel& m) {
    const double kappa = m.kappa();
    const double drive = m.H.mean() * m.rho + m.a * m.delta;
    if (std::abs(kappa) < kKappaZero)
        return m.lambda0 * t + 0.5 * drive * t * t;
    const double mu1 = drive / kappa;
    return mu1 * t + (m.lambda0 - mu1) * (1.0 - std::exp(-kappa * t)) / kappa;
}

double mean_C_P(double t, const PhysicalModel& m) {
    return m.J.mean() * mean_N_P(t, m);
}

MomentReport moments_P(double t, const PhysicalModel& m) {
    return {t, mean_lambda_P(t, m), mean_N_P(t, m), mean_C_P(t, m), Measure::P,
            MomentMethod::ClosedForm};
}

// ---------------------------------------------------------------------------
// Time-inhomogeneous route: the conditional-mean formula evaluated with
// cumulative Simpson on a shared fine grid. Odd nodes use the asymmetric
// third-order Newton-Cotes update so every node carries an O(h^4) cumulative.

namespace {

std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
    const std::size_t m = f.size() - 1;  // even
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (i + 2 <= m) {
            cum[i + 1] = cum[i] + h / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
        } else {
            cum[i + 1] = cum[i] + h / 12.0 * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]);
        }
    }
    return cum;
}

struct InhomEval {
    double mean_lambda = 0.0;
    double mean_N = 0.0;
};

InhomEval eval_inhom(double t, const TimeVaryingParams& p, std::size_t m) {
    const double h = t / static_cast<double>(m);
    std::vector<double> kap(m + 1), forcing(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double s = h * static_cast<double>(i);
        kap[i] = p.delta - p.mu_G(s);
        forcing[i] = p.rho(s) * p.mu_H(s) + p.a(s) * p.delta;
    }
    const auto K = cumulative_simpson(kap, h);
    std::vector<double> inner(m + 1);
    for (std::size_t i = 0; i <= m; ++i) inner[i] = std::exp(K[i]) * forcing[i];
    const auto S = cumulative_simpson(inner, h);
    std::vector<double> mu(m + 1);
    for (std::size_t i = 0; i <= m; ++i)
        mu[i] = std::exp(-K[i]) * (p.lambda0 + S[i]);
    const auto N = cumulative_simpson(mu, h);
    return {mu[m], N[m]};
}

InhomEval refine_inhom(double t, const TimeVaryingParams& p, double rel_tol) {
    InhomEval prev = eval_inhom(t, p, 256);
    for (std::size_t m = 512; m <= (1u << 21); m *= 2) {
        InhomEval cur = eval_inhom(t, p, m);
        const double dl = std::abs(cur.mean_lambda - prev.mean_lambda);
        const double dn = std::abs(cur.mean_N - prev.mean_N);
        if (dl <= rel_tol * std::abs(cur.mean_lambda) + 1e-300 &&
            dn <= rel_tol * std::abs(cur.mean_N) + 1e-300)
            return cur;
        prev = cur;
    }
    fail(ErrorCode::QuadratureNotConverged,
         "inhomogeneous moment refinement stalled at t=" + std::to_string(t));
}

}  // namespace

double mean_lambda_inhom(double t, const TimeVaryingParams& p, double rel_tol) {
    if (t == 0.0) return p.lambda0;
    return refine_inhom(t, p, rel_tol).mean_lambda;
}

double mean_N_inhom(double t, const TimeVaryingParams& p, double rel_tol) {
    if (t == 0.0) return 0.0;
    return refine_inhom(t, p, rel_tol).mean_N;
}

double mean_C_inhom(double t, const TimeVaryingParams& p, double rel_tol) {
    return p.mu_J * mean_N_inhom(t, p, rel_tol);
}

TimeVaryingParams tilted_params(const TiltedModel& tm) {
    // Scaled-representation parameter functions; Proposition-style moments of
    // this parameter set are exactly the tilted-mean formulas.
    auto m = std::make_shared<TiltedModel>(
        tm.with_representation(TiltRepresentation::LambdaTilde));
    TimeVaryingParams p;
    p.lambda0 = m->base().lambda0;
    p.delta = m->base().delta;
    p.rho = [m](double s) { return m->external_rate(s); };
    p.mu_H = [m](double s) { return m->external_jumps(s).mean(); };
    p.a = [m](double s) { return m->level(s); };
    p.mu_G = [m](double s) { return m->self_jumps(s).mean(); };
    p.mu_J = m->claim_mean();
    return p;
}

// ---------------------------------------------------------------------------
// Direct tilted-mean route: RK4 on the coupled ODE
//   mu' = -I(s) mu + F(s),  N' = mu,
// I(s) = delta - mu_G~(s), F(s) = rho~(s) mu_H~(s) + a~(s) delta.

namespace {

struct StarEval {
    double mean_lambda = 0.0;
    double mean_N = 0.0;
};

StarEval eval_star(double t, const TiltedModel& tmt, std::size_t n) {
    const PhysicalModel& base = tmt.base();
    auto decay = [&](double s) { return base.delta - tmt.self_jumps(s).mean(); };
    auto forcing = [&](double s) {
        return tmt.external_rate(s) * tmt.external_jumps(s).mean() +
               tmt.level(s) * base.delta;
    };
    const double h = t / static_cast<double>(n);
    double mu = base.lambda0;
    double N = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = h * static_cast<double>(i);
        auto f = [&](double sv, double muv) { return -decay(sv) * muv + forcing(sv); };
        const double k1 = f(s, mu);
        const double l1 = mu;
        const double k2 = f(s + 0.5 * h, mu + 0.5 * h * k1);
        const double l2 = mu + 0.5 * h * k1;
        const double k3 = f(s + 0.5 * h, mu + 0.5 * h * k2);
        const double l3 = mu + 0.5 * h * k2;
        const double k4 = f(s + h, mu + h * k3);
        const double l4 = mu + h * k3;
        N += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
        mu += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return {mu, N};
}

StarEval refine_star(double t, const TiltedModel& tm, double rel_tol) {
    auto tmt = tm.representation() == TiltRepresentation::LambdaTilde
                   ? tm
                   : tm.with_representation(TiltRepresentation::LambdaTilde);
    StarEval prev = eval_star(t, tmt, 128);
    for (std::size_t n = 256; n <= (1u << 20); n *= 2) {
        StarEval cur = eval_star(t, tmt, n);
        if (std::abs(cur.mean_N - prev.mean_N) <=
                rel_tol * std::abs(cur.mean_N) + 1e-300 &&
            std::abs(cur.mean_lambda - prev.mean_lambda) <=
                rel_tol * std::abs(cur.mean_lambda) + 1e-300)
            return cur;
        prev = cur;
    }
    fail(ErrorCode::QuadratureNotConverged,
         "tilted-mean refinement stalled at t=" + std::to_string(t));
}

}  // namespace

double mean_lambda_star(double t, const TiltedModel& tm, double rel_tol) {
    if (t == 0.0) return tm.base().lambda0;
    if (t > tm.horizon() * (1.0 + 1e-12))
        fail(ErrorCode::OutOfDomain, "t exceeds the solved B-curve horizon");
    return refine_star(t, tm, rel_tol).mean_lambda;
}

double mean_N_star(double t, const TiltedModel& tm, double rel_tol) {
    if (t == 0.0) return 0.0;
    if (t > tm.horizon() * (1.0 + 1e-12))
        fail(ErrorCode::OutOfDomain, "t exceeds the solved B-curve horizon");
    return refine_star(t, tm, rel_tol).mean_N;
}

double mean_C_star(double t, const TiltedModel& tm, double rel_tol) {
    return tm.claim_mean() * mean_N_star(t, tm, rel_tol);
}

MomentReport moments_star(double t, const TiltedModel& tm) {
    return {t,
            mean_lambda_star(t, tm),
            mean_N_star(t, tm),
            mean_C_star(t, tm),
            Measure::Pstar,
            MomentMethod::Quadrature};
}

}  // namespace cdcp
