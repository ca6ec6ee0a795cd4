#include "cdcp/esscher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdcp/errors.hpp"
#include "cdcp/quadrature.hpp"
#include "cdcp/simulate.hpp"

namespace cdcp {

namespace {

double interp_uniform(const std::vector<double>& grid,
                      const std::vector<double>& values, double t,
                      const char* what) {
    const double t0 = grid.front();
    const double t1 = grid.back();
    const double slack = 1e-12 * std::max(1.0, std::abs(t1));
    if (t < t0 - slack || t > t1 + slack)
        fail(ErrorCode::OutOfDomain,
             std::string(what) + " queried at t=" + std::to_string(t) +
                 " outside [" + std::to_string(t0) + ", " + std::to_string(t1) + "]");
    const double h = (t1 - t0) / static_cast<double>(grid.size() - 1);
    const double x = (t - t0) / h;
    const auto i = static_cast<std::size_t>(
        std::clamp(x, 0.0, static_cast<double>(grid.size() - 2)));
    const double w = std::clamp(x - static_cast<double>(i), 0.0, 1.0);
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

}  // namespace

double BCurve::at(double t) const { return interp_uniform(grid, values, t, "B"); }
double KCurve::at(double t) const { return interp_uniform(grid, values, t, "K"); }

double f1(double B, const PhysicalModel& m, const EsscherParams& e) {
    return m.delta * B - e.theta * e.jhat(m) * (m.G.laplace(-B) - 1.0);
}

// Smallest positive root of f1 by bracketed bisection. f1(0) = 0 with positive
// slope and strict concavity, so the root is bracketed by the first scan point
// where f1 turns negative.
double b_plus_bisection(const PhysicalModel& m, const EsscherParams& e) {
    const double upper_support = m.G.rate();  // ghat(-B) diverges at B = rate
    const double slope0 = m.delta - e.theta * e.jhat(m) * m.G.mean();
    if (!(slope0 > 0.0))
        fail(ErrorCode::NoPositiveRoot,
             "f1 has nonpositive slope at 0 (delta <= theta*jhat*mu_G)");
    double lo = 0.0, hi = 0.0;
    bool bracketed = false;
    for (double u = upper_support * (1.0 - 1e-8); u > 1e-14;
         u *= 0.5) {  // geometric scan from just below the support edge
        if (f1(u, m, e) <= 0.0) {
            hi = u;
        } else {
            lo = u;
            bracketed = hi > 0.0;
            break;
        }
    }
    if (!bracketed)
        fail(ErrorCode::NoPositiveRoot, "f1 has no positive root below the Laplace domain edge");
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (f1(mid, m, e) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double b_plus(const PhysicalModel& m, const EsscherParams& e) {
    const double tj = e.theta * e.jhat(m);
    if (m.G.kind() == JumpKind::Exponential) {
        const double beta = m.G.rate();
        if (!(m.delta * beta > tj))
            fail(ErrorCode::NoPositiveRoot,
                 "delta*beta <= theta*jhat(nu): no positive root for f1");
        return beta - tj / m.delta;
    }
    return b_plus_bisection(m, e);
}

double g_of_B(double B, const PhysicalModel& m, const EsscherParams& e) {
    const double b = e.b;
    const double bp = b_plus(m, e);
    if (B < b || B >= bp)
        fail(ErrorCode::OutOfDomain,
             "G-function domain is [b, B+) = [" + std::to_string(b) + ", " +
                 std::to_string(bp) + "), got B=" + std::to_string(B));
    if (B == b) return 0.0;
    // 1/f1 blows up like 1/(kappa~ u) at the left end and like
    // 1/(f1'(B+)(u - B+)) at the root, so integrate in log coordinates
    // anchored at each end: u = b e^v below the midpoint, u = B+ - e^w above.
    auto left_part = [&](double from, double to) {
        if (to <= from) return 0.0;
        return integrate(
            [&](double v) {
                const double u = b * std::exp(v);
                return u / f1(u, m, e);
            },
            std::log(from / b), std::log(to / b), 1e-10);
    };
    const double mid = b + 0.5 * (bp - b);
    if (B <= mid) return left_part(b, B);
    const double right = integrate(
        [&](double w) {
            const double u = bp - std::exp(w);
            return std::exp(w) / f1(u, m, e);
        },
        std::log(bp - B), std::log(bp - mid), 1e-10);
    return left_part(b, mid) + right;
}

// Cumulative G-function along a solved grid: per-cell Simpson, one pass. The
// cells are short (RK4 steps), so fixed low-order panels per cell are exact to
// well below the identity tolerance; used for the solve_B self-check.
static std::vector<double> g_cumulative(const std::vector<double>& values,
                                        const PhysicalModel& m,
                                        const EsscherParams& e) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double lo = values[i];
        const double hi = values[i + 1];
        out[i + 1] = out[i] + composite_simpson(
                                  [&](double u) { return 1.0 / f1(u, m, e); },
                                  lo, hi, 8);
    }
    return out;
}

Regime classify_regime(const PhysicalModel& m, const EsscherParams& e,
                       const BCurve& bcurve) {
    const double alpha = m.H.rate();
    Regime r;
    if (alpha >= bcurve.b_plus) {
        r.type = RegimeType::Type1;
    } else if (alpha > bcurve.b) {
        r.type = RegimeType::Type2;
        r.t_star = g_of_B(alpha, m, e);
    } else {
        r.type = RegimeType::Type3;
    }
    return r;
}

BCurve solve_B(const PhysicalModel& m, const EsscherParams& e, double T,
               std::size_t n_grid, double identity_tol) {
    if (!(T > 0.0)) fail(ErrorCode::ConfigInvalid, "horizon T must be > 0");
    if (n_grid < 2) fail(ErrorCode::ConfigInvalid, "n_grid must be >= 2");
    const double bp = b_plus(m, e);
    if (!(e.b > 0.0) || e.b >= bp)
        fail(ErrorCode::OutOfDomain,
             "initial condition b=" + std::to_string(e.b) +
                 " must lie in (0, B+) with B+=" + std::to_string(bp));

    BCurve out;
    out.b = e.b;
    out.b_plus = bp;
    out.grid.resize(n_grid + 1);
    out.values.resize(n_grid + 1);
    const double h = T / static_cast<double>(n_grid);
    auto rhs = [&](double B) { return f1(B, m, e); };
    double B = e.b;
    out.grid[0] = 0.0;
    out.values[0] = B;
    for (std::size_t i = 0; i < n_grid; ++i) {
        const double k1 = rhs(B);
        const double k2 = rhs(B + 0.5 * h * k1);
        const double k3 = rhs(B + 0.5 * h * k2);
        const double k4 = rhs(B + h * k3);
        B += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        // f1 > 0 on (0,B+) and f1(B+) = 0, so the exact flow stays below B+;
        // clip the last ulp of RK4 error rather than step across the root
        B = std::min(B, bp * (1.0 - 1e-15));
        out.grid[i + 1] = h * static_cast<double>(i + 1);
        out.values[i + 1] = B;
    }
    out.grid.back() = T;

    // self-consistency against the independent G-function route
    const auto tback = g_cumulative(out.values, m, e);
    for (std::size_t i = 1; i <= n_grid; ++i) {
        if (std::abs(tback[i] - out.grid[i]) > identity_tol)
            fail(ErrorCode::GridTooCoarse,
                 "G(B(t)) = t identity off by " +
                     std::to_string(std::abs(tback[i] - out.grid[i])) + " at t=" +
                     std::to_string(out.grid[i]));
    }
    out.regime = classify_regime(m, e, out);
    return out;
}

KCurve solve_K(const PhysicalModel& m, const EsscherParams& e,
               const BCurve& bcurve) {
    // K'(t) = -a*delta*B(t) - rho*(psi*hhat(-B(t)) - 1); cumulative Simpson
    // per cell with the midpoint from the interpolated curve
    auto kprime = [&](double B) {
        return -m.a * m.delta * B - m.rho * (e.psi * m.H.laplace(-B) - 1.0);
    };
    KCurve out;
    out.grid = bcurve.grid;
    out.values.assign(bcurve.grid.size(), 0.0);
    for (std::size_t i = 0; i + 1 < bcurve.grid.size(); ++i) {
        const double h = bcurve.grid[i + 1] - bcurve.grid[i];
        const double fm = kprime(bcurve.at(bcurve.grid[i] + 0.5 * h));
        const double f0 = kprime(bcurve.values[i]);
        const double f1v = kprime(bcurve.values[i + 1]);
        out.values[i + 1] = out.values[i] + h / 6.0 * (f0 + 4.0 * fm + f1v);
    }
    return out;
}

TiltedModel::TiltedModel(PhysicalModel base, EsscherParams esscher,
                         BCurve bcurve, TiltRepresentation rep)
    : base_(std::move(base)),
      esscher_(esscher),
      bcurve_(std::move(bcurve)),
      rep_(rep),
      claims_(esscher.nu == 0.0 ? base_.J : base_.J.tilt_claim(esscher.nu)),
      theta_jhat_(esscher.theta * esscher.jhat(base_)) {}

double TiltedModel::rate_multiplier(double t) const {
    return theta_jhat_ * base_.G.laplace(-bcurve_.at(t));
}

double TiltedModel::external_rate(double t) const {
    return esscher_.psi * base_.H.laplace(-bcurve_.at(t)) * base_.rho;
}

double TiltedModel::level(double t) const {
    return rep_ == TiltRepresentation::LambdaTilde
               ? rate_multiplier(t) * base_.a
               : base_.a;
}

JumpDist TiltedModel::external_jumps(double t) const {
    JumpDist tilted = base_.H.exp_tilt(bcurve_.at(t));
    return rep_ == TiltRepresentation::LambdaTilde
               ? tilted.scale(rate_multiplier(t))
               : tilted;
}

JumpDist TiltedModel::self_jumps(double t) const {
    JumpDist tilted = base_.G.exp_tilt(bcurve_.at(t));
    return rep_ == TiltRepresentation::LambdaTilde
               ? tilted.scale(rate_multiplier(t))
               : tilted;
}

TiltedModel TiltedModel::with_representation(TiltRepresentation rep) const {
    return TiltedModel(base_, esscher_, bcurve_, rep);
}

StationarityReport TiltedModel::stationarity() const {
    // Tilted stationary condition delta > c(t)/(beta - B(t)); evaluated both
    // with the full claim transform jhat(nu) and with the single-power variant
    // (gamma/(gamma+nu)) that drops the shape exponent.
    StationarityReport rep;
    const double beta = base_.G.rate();
    const double gamma_rate = base_.J.rate();
    const double single_power = gamma_rate / (gamma_rate + esscher_.nu);
    double worst_full = std::numeric_limits<double>::infinity();
    double worst_disp = std::numeric_limits<double>::infinity();
    for (double B : bcurve_.values) {
        const double gh = base_.G.laplace(-B);
        const double full = base_.delta - esscher_.theta * esscher_.jhat(base_) *
                                              gh / (beta - B);
        const double disp =
            base_.delta - esscher_.theta * single_power * gh / (beta - B);
        worst_full = std::min(worst_full, full);
        worst_disp = std::min(worst_disp, disp);
    }
    rep.worst_margin_full = worst_full;
    rep.worst_margin_displayed = worst_disp;
    rep.holds_full = worst_full > 0.0;
    rep.holds_displayed = worst_disp > 0.0;
    return rep;
}

TiltedModel tilt_model(const PhysicalModel& m, const EsscherParams& e,
                       const BCurve& bcurve) {
    if (m.G.kind() != JumpKind::Exponential || m.H.kind() != JumpKind::Exponential)
        fail(ErrorCode::ConfigInvalid,
             "tilting is specified for exponential self/external jump sizes");
    e.validate(m);
    const Regime regime = bcurve.regime;
    if (regime.type == RegimeType::Type3)
        fail(ErrorCode::HorizonExceedsRegime,
             "alpha <= b: B(t) cannot stay below alpha for any horizon");
    if (regime.type == RegimeType::Type2 &&
        bcurve.horizon() >= regime.t_star.value())
        fail(ErrorCode::HorizonExceedsRegime,
             "horizon " + std::to_string(bcurve.horizon()) +
                 " reaches t* = " + std::to_string(regime.t_star.value()));
    const double b_max = *std::max_element(bcurve.values.begin(), bcurve.values.end());
    if (b_max >= std::min(m.H.rate(), m.G.rate()))
        fail(ErrorCode::DivergentTransform,
             "B(t) reaches min(alpha, beta) inside the horizon");
    return TiltedModel(m, e, bcurve);
}

double log_martingale_statistic(const SimPath& path, const PhysicalModel& m,
                                const EsscherParams& e, const BCurve& bcurve,
                                const KCurve& kcurve, double t) {
    if (t < 0.0 || t > path.horizon)
        fail(ErrorCode::OutOfHorizon, "statistic time outside simulated horizon");
    const double lam = path.lambda_at(t);
    const double Lam = path.Lambda_at(t);
    const double phi = e.phi(m);
    const auto N = static_cast<double>(path.N_at(t));
    const auto M = static_cast<double>(path.M_at(t));
    const double C = path.C_at(t);
    return kcurve.at(t) + N * std::log(e.theta) + bcurve.at(t) * lam -
           e.nu * C + phi * Lam + M * std::log(e.psi);
}

double martingale_statistic(const SimPath& path, const PhysicalModel& m,
                            const EsscherParams& e, const BCurve& bcurve,
                            const KCurve& kcurve, double t) {
    const double logstat =
        log_martingale_statistic(path, m, e, bcurve, kcurve, t);
    if (logstat > 700.0)
        fail(ErrorCode::Overflow,
             "martingale statistic exponent " + std::to_string(logstat) +
                 " exceeds double range; use log_martingale_statistic");
    return std::exp(logstat);
}

}  // namespace cdcp
