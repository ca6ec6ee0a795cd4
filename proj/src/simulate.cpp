#include "cdcp/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "cdcp/errors.hpp"

namespace cdcp {

// ---------------------------------------------------------------------------
// DeterministicBase

DeterministicBase DeterministicBase::constant(double lambda0, double delta,
                                              double a) {
    DeterministicBase b;
    b.lambda0_ = lambda0;
    b.delta_ = delta;
    b.constant_ = true;
    b.a_const_ = a;
    return b;
}

DeterministicBase DeterministicBase::from_grid(double lambda0, double delta,
                                               std::vector<double> grid,
                                               std::vector<double> level) {
    if (grid.size() != level.size() || grid.size() < 2)
        fail(ErrorCode::ConfigInvalid, "level grid needs >= 2 matching points");
    DeterministicBase b;
    b.lambda0_ = lambda0;
    b.delta_ = delta;
    b.constant_ = false;
    b.grid_ = std::move(grid);
    b.level_ = std::move(level);
    // Exact per-cell recursion for v' = delta*(a(t) - v) with piecewise-linear
    // a(t): over a cell of width h with a(t0)=p, slope q,
    //   v(t0+h) = e^{-dh} v(t0) + p(1-e^{-dh}) + q[h - (1-e^{-dh})/d].
    const std::size_t n = b.grid_.size();
    b.node_value_.assign(n, 0.0);
    b.node_integral_.assign(n, 0.0);
    b.node_value_[0] = lambda0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = b.grid_[i + 1] - b.grid_[i];
        const double p = b.level_[i];
        const double q = (b.level_[i + 1] - b.level_[i]) / h;
        const double em = std::exp(-delta * h);
        const double g = (1.0 - em) / delta;
        const double v0 = b.node_value_[i];
        b.node_value_[i + 1] = em * v0 + p * (1.0 - em) + q * (h - g);
        // running integral of v over the cell (same closed form integrated once more)
        b.node_integral_[i + 1] =
            b.node_integral_[i] + v0 * g + p * (h - g) +
            q * (0.5 * h * h - h / delta + g / delta);
    }
    return b;
}

std::size_t DeterministicBase::cell(double t) const {
    const double t0 = grid_.front();
    const double h = (grid_.back() - t0) / static_cast<double>(grid_.size() - 1);
    auto i = static_cast<std::ptrdiff_t>((t - t0) / h);
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(grid_.size()) - 2));
}

double DeterministicBase::level(double t) const {
    if (constant_) return a_const_;
    const std::size_t i = cell(t);
    const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return level_[i] * (1.0 - w) + level_[i + 1] * w;
}

double DeterministicBase::max_level(double t0, double t1) const {
    if (constant_) return a_const_;
    return std::max(level(t0), level(t1));
}

double DeterministicBase::value(double t) const {
    if (constant_) return a_const_ + (lambda0_ - a_const_) * std::exp(-delta_ * t);
    const std::size_t i = cell(t);
    const double tau = t - grid_[i];
    const double p = level_[i];
    const double q = (level_[i + 1] - level_[i]) / (grid_[i + 1] - grid_[i]);
    const double em = std::exp(-delta_ * tau);
    const double g = (1.0 - em) / delta_;
    return em * node_value_[i] + p * (1.0 - em) + q * (tau - g);
}

double DeterministicBase::integral(double t) const {
    if (constant_)
        return a_const_ * t +
               (lambda0_ - a_const_) * (1.0 - std::exp(-delta_ * t)) / delta_;
    const std::size_t i = cell(t);
    const double tau = t - grid_[i];
    const double p = level_[i];
    const double q = (level_[i + 1] - level_[i]) / (grid_[i + 1] - grid_[i]);
    const double em = std::exp(-delta_ * tau);
    const double g = (1.0 - em) / delta_;
    return node_integral_[i] + node_value_[i] * g + p * (tau - g) +
           q * (0.5 * tau * tau - tau / delta_ + g / delta_);
}

// ---------------------------------------------------------------------------
// SimPath

namespace {

double decayed_sum(const std::vector<SimPath::ExternalEvent>& evs, double t,
                   double delta) {
    double s = 0.0;
    for (const auto& ev : evs) {
        if (ev.time > t) break;
        s += ev.mark * std::exp(-delta * (t - ev.time));
    }
    return s;
}

double decayed_sum(const std::vector<SimPath::SelfEvent>& evs, double t,
                   double delta) {
    double s = 0.0;
    for (const auto& ev : evs) {
        if (ev.time > t) break;
        s += ev.intensity_mark * std::exp(-delta * (t - ev.time));
    }
    return s;
}

void check_horizon(double t, double horizon) {
    if (t < 0.0 || t > horizon * (1.0 + 1e-12) + 1e-300)
        fail(ErrorCode::OutOfHorizon,
             "t=" + std::to_string(t) + " outside simulated horizon " +
                 std::to_string(horizon));
}

}  // namespace

double SimPath::lambda_at(double t) const {
    check_horizon(t, horizon);
    return base.value(t) + decayed_sum(external_events, t, base.delta()) +
           decayed_sum(self_events, t, base.delta());
}

double SimPath::Lambda_at(double t) const {
    check_horizon(t, horizon);
    const double d = base.delta();
    double s = base.integral(t);
    for (const auto& ev : external_events) {
        if (ev.time > t) break;
        s += ev.mark / d * (1.0 - std::exp(-d * (t - ev.time)));
    }
    for (const auto& ev : self_events) {
        if (ev.time > t) break;
        s += ev.intensity_mark / d * (1.0 - std::exp(-d * (t - ev.time)));
    }
    return s;
}

std::size_t SimPath::N_at(double t) const {
    check_horizon(t, horizon);
    std::size_t n = 0;
    for (const auto& ev : self_events) {
        if (ev.time > t) break;
        ++n;
    }
    return n;
}

std::size_t SimPath::M_at(double t) const {
    check_horizon(t, horizon);
    std::size_t n = 0;
    for (const auto& ev : external_events) {
        if (ev.time > t) break;
        ++n;
    }
    return n;
}

double SimPath::C_at(double t) const {
    check_horizon(t, horizon);
    double c = 0.0;
    for (const auto& ev : self_events) {
        if (ev.time > t) break;
        c += ev.claim_mark;
    }
    return c;
}

double SimPath::total_claims() const {
    double c = 0.0;
    for (const auto& ev : self_events) c += ev.claim_mark;
    return c;
}

// ---------------------------------------------------------------------------
// Samplers

std::vector<double> sample_inhomogeneous_poisson(
    double T, const std::function<double(double)>& rate, RngStream& rng,
    std::size_t scan_points) {
    double rate_max = 0.0;
    for (std::size_t i = 0; i <= scan_points; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(scan_points);
        const double r = rate(t);
        if (!std::isfinite(r) || r < 0.0)
            fail(ErrorCode::UnboundedRate,
                 "rate is not finite/nonnegative at t=" + std::to_string(t));
        rate_max = std::max(rate_max, r);
    }
    rate_max *= 1.0 + 1e-12;
    std::vector<double> out;
    if (rate_max == 0.0) return out;
    const std::uint64_t n = rng.poisson(rate_max * T);
    std::vector<double> cand(n);
    for (auto& c : cand) c = T * rng.uniform();
    std::sort(cand.begin(), cand.end());
    out.reserve(n);
    for (double tc : cand) {
        const double r = rate(tc);
        if (r > rate_max)
            fail(ErrorCode::UnboundedRate,
                 "rate exceeds scanned bound at t=" + std::to_string(tc));
        if (rng.uniform() < r / rate_max) out.push_back(tc);
    }
    return out;
}

namespace {

// lambda^{(c)}: deterministic base plus decayed external marks. Between
// external jumps it solves v' = delta*(level(t) - v), so on any window its
// supremum is attained at a segment endpoint or bounded by the level.
struct CoxPart {
    const DeterministicBase* base;
    const std::vector<SimPath::ExternalEvent>* ext;
    double delta;

    double operator()(double t) const {
        return base->value(t) + decayed_sum(*ext, t, delta);
    }

    double max_over(double t0, double t1) const {
        double m = std::max((*this)(t0), (*this)(t1));
        m = std::max(m, base->max_level(t0, t1));
        for (const auto& ev : *ext) {
            if (ev.time <= t0) continue;
            if (ev.time > t1) break;
            m = std::max(m, (*this)(ev.time));
        }
        return m;
    }
};

}  // namespace

SimPath simulate_dynamics(const CdcpDynamics& dyn, double T, double dt_max,
                          RngStream& rng, std::size_t level_grid) {
    if (!(dt_max > 0.0)) fail(ErrorCode::ConfigInvalid, "dt_max must be > 0");
    if (!(T > 0.0)) fail(ErrorCode::ConfigInvalid, "horizon T must be > 0");

    SimPath path;
    path.horizon = T;

    // deterministic part of the intensity
    if (dyn.level) {
        std::vector<double> g(level_grid + 1), lv(level_grid + 1);
        bool varies = false;
        for (std::size_t i = 0; i <= level_grid; ++i) {
            g[i] = T * static_cast<double>(i) / static_cast<double>(level_grid);
            lv[i] = dyn.level(g[i]);
            varies = varies || lv[i] != lv[0];
        }
        path.base = varies ? DeterministicBase::from_grid(dyn.lambda0, dyn.delta,
                                                          std::move(g), std::move(lv))
                           : DeterministicBase::constant(dyn.lambda0, dyn.delta, lv[0]);
    } else {
        path.base = DeterministicBase::constant(dyn.lambda0, dyn.delta, 0.0);
    }

    // externally excited events first (Algorithm-style: full horizon upfront),
    // marks drawn from the law at the event time
    auto ext_times = sample_inhomogeneous_poisson(T, dyn.ext_rate, rng);
    path.external_events.reserve(ext_times.size());
    for (double te : ext_times)
        path.external_events.push_back({te, dyn.ext_jumps(te).sample(rng)});

    CoxPart cox{&path.base, &path.external_events, dyn.delta};
    auto mult = [&](double t) { return dyn.rate_mult ? dyn.rate_mult(t) : 1.0; };

    // thinning with a local dominating bound per lookahead window; the Hawkes
    // part only decays until the next accepted event and level/rate_mult are
    // monotone, so the bound is exact up to endpoint evaluation
    double t = 0.0;
    double hawkes = 0.0;  // sum of decayed self marks at current t
    while (t < T) {
        const double te = std::min(t + dt_max, T);
        const double mult_max = std::max(mult(t), mult(te));
        const double bound = mult_max * (cox.max_over(t, te) + hawkes);
        if (bound <= 0.0) {
            t = te;
            continue;
        }
        const double step = rng.exponential(bound);
        if (t + step > te) {
            hawkes *= std::exp(-dyn.delta * (te - t));
            t = te;
            continue;
        }
        hawkes *= std::exp(-dyn.delta * step);
        t += step;
        const double intensity = mult(t) * (cox(t) + hawkes);
        if (intensity > bound * (1.0 + 1e-9))
            fail(ErrorCode::DominationViolated,
                 "local bound " + std::to_string(bound) + " exceeded by " +
                     std::to_string(intensity) + " at t=" + std::to_string(t));
        if (rng.uniform() < intensity / bound) {
            const double y = dyn.self_jumps(t).sample(rng);
            const double xi = dyn.claims.sample(rng);
            path.self_events.push_back({t, y, xi});
            hawkes += y;
        }
    }
    return path;
}

CdcpDynamics dynamics_of(const PhysicalModel& m) {
    CdcpDynamics dyn;
    dyn.lambda0 = m.lambda0;
    dyn.delta = m.delta;
    dyn.level = [a = m.a](double) { return a; };
    dyn.ext_rate = [rho = m.rho](double) { return rho; };
    dyn.ext_jumps = [H = m.H](double) { return H; };
    dyn.self_jumps = [G = m.G](double) { return G; };
    dyn.claims = m.J;
    dyn.rate_mult = nullptr;
    return dyn;
}

CdcpDynamics dynamics_of(const TiltedModel& tm) {
    CdcpDynamics dyn;
    dyn.lambda0 = tm.base().lambda0;
    dyn.delta = tm.base().delta;
    dyn.level = [&tm](double t) { return tm.level(t); };
    dyn.ext_rate = [&tm](double t) { return tm.external_rate(t); };
    dyn.ext_jumps = [&tm](double t) { return tm.external_jumps(t); };
    dyn.self_jumps = [&tm](double t) { return tm.self_jumps(t); };
    dyn.claims = tm.claims();
    if (tm.representation() == TiltRepresentation::Lambda)
        dyn.rate_mult = [&tm](double t) { return tm.rate_multiplier(t); };
    else
        dyn.rate_mult = nullptr;
    return dyn;
}

SimPath simulate_cdcp(const PhysicalModel& m, double T, double dt_max,
                      RngStream& rng) {
    return simulate_dynamics(dynamics_of(m), T, dt_max, rng);
}

SimPath simulate_cdcp(const TiltedModel& tm, double T, double dt_max,
                      RngStream& rng) {
    if (T > tm.horizon() * (1.0 + 1e-12))
        fail(ErrorCode::OutOfHorizon,
             "requested horizon exceeds the solved B-curve horizon");
    return simulate_dynamics(dynamics_of(tm), T, dt_max, rng);
}

}  // namespace cdcp
