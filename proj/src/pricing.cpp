#include "cdcp/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cdcp/errors.hpp"
#include "cdcp/moments.hpp"

namespace cdcp {

namespace {

// pairwise summation keeps aggregation order-independent of the worker count
double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 64) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

PremiumEstimate estimate_from_payoffs(const std::vector<double>& payoff,
                                      Measure measure, double retention,
                                      double horizon, const McSettings& s) {
    const std::size_t n = payoff.size();
    PremiumEstimate est;
    est.n_paths = n;
    est.seed = s.seed;
    est.measure = measure;
    est.retention = retention;
    est.horizon = horizon;
    est.value = pairwise_sum(payoff.data(), n) / static_cast<double>(n);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = payoff[i] - est.value;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
    est.stderr_ = std::sqrt(var / static_cast<double>(n));
    est.ci_lo = est.value - 1.96 * est.stderr_;
    est.ci_hi = est.value + 1.96 * est.stderr_;
    return est;
}

}  // namespace

std::vector<double> simulate_terminal_claims(const SimModel& model, double t,
                                             const McSettings& s) {
    if (s.n_paths < 2)
        fail(ErrorCode::InsufficientPaths, "need at least 2 paths, got " +
                                               std::to_string(s.n_paths));
    std::vector<double> claims(s.n_paths);
    const unsigned n_threads =
        std::min<unsigned>(resolve_threads(s.threads),
                           static_cast<unsigned>(s.n_paths));
    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            RngStream rng(s.seed, i);
            SimPath p = std::visit(
                [&](const auto& m) { return simulate_cdcp(m, t, s.dt_max, rng); },
                model);
            claims[i] = p.total_claims();
        }
    };
    if (n_threads <= 1) {
        worker(0, s.n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        const std::size_t block =
            (s.n_paths + n_threads - 1) / n_threads;
        for (unsigned k = 0; k < n_threads; ++k) {
            const std::size_t lo = static_cast<std::size_t>(k) * block;
            const std::size_t hi = std::min(lo + block, s.n_paths);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return claims;
}

PremiumEstimate stop_loss_premium(const SimModel& model, Measure measure,
                                  double retention, double t,
                                  const McSettings& s) {
    if ((measure == Measure::P) != std::holds_alternative<PhysicalModel>(model))
        fail(ErrorCode::ConfigInvalid,
             "measure does not match the supplied model kind");
    const auto claims = simulate_terminal_claims(model, t, s);
    std::vector<double> payoff(claims.size());
    for (std::size_t i = 0; i < claims.size(); ++i)
        payoff[i] = std::max(claims[i] - retention, 0.0);
    return estimate_from_payoffs(payoff, measure, retention, t, s);
}

std::vector<PremiumEstimate> premium_table(const SimModel& model,
                                           Measure measure,
                                           const std::vector<double>& retentions,
                                           double t, const McSettings& s) {
    if ((measure == Measure::P) != std::holds_alternative<PhysicalModel>(model))
        fail(ErrorCode::ConfigInvalid,
             "measure does not match the supplied model kind");
    std::vector<PremiumEstimate> out;
    if (retentions.empty()) return out;
    // one common path set across retentions
    const auto claims = simulate_terminal_claims(model, t, s);
    std::vector<double> payoff(claims.size());
    out.reserve(retentions.size());
    for (double L : retentions) {
        for (std::size_t i = 0; i < claims.size(); ++i)
            payoff[i] = std::max(claims[i] - L, 0.0);
        out.push_back(estimate_from_payoffs(payoff, measure, L, t, s));
    }
    return out;
}

SweepParam sweep_param_from_string(const std::string& name) {
    if (name == "theta") return SweepParam::Theta;
    if (name == "psi") return SweepParam::Psi;
    if (name == "nu") return SweepParam::Nu;
    if (name == "L" || name == "retention") return SweepParam::Retention;
    fail(ErrorCode::ConfigInvalid,
         "sweep param must be one of theta|psi|nu|L, got \"" + name + "\"");
}

std::string sweep_param_name(SweepParam p) {
    switch (p) {
        case SweepParam::Theta: return "theta";
        case SweepParam::Psi: return "psi";
        case SweepParam::Nu: return "nu";
        case SweepParam::Retention: return "L";
    }
    return "?";
}

std::vector<SweepRow> sensitivity_sweep(const PhysicalModel& m,
                                        const EsscherParams& base,
                                        const SweepSpec& spec, double t,
                                        std::size_t bcurve_grid,
                                        const McSettings& s) {
    std::vector<SweepRow> rows;
    rows.reserve(spec.values.size());
    for (double v : spec.values) {
        SweepRow row;
        row.param_value = v;
        EsscherParams e = base;
        double sl_retention = spec.stop_loss_retention;
        switch (spec.param) {
            case SweepParam::Theta: e.theta = v; break;
            case SweepParam::Psi: e.psi = v; break;
            case SweepParam::Nu: e.nu = v; break;
            case SweepParam::Retention: sl_retention = v; break;
        }
        try {
            e.validate(m);
            BCurve bc = solve_B(m, e, t, bcurve_grid);
            TiltedModel tm = tilt_model(m, e, bc);
            row.analytic = mean_C_star(t, tm);
            SimModel sim{tm};
            // common random numbers: same seed, same per-path streams for
            // every swept value
            const auto claims = simulate_terminal_claims(sim, t, s);
            std::vector<double> payoff(claims.size());
            for (std::size_t i = 0; i < claims.size(); ++i)
                payoff[i] = std::max(claims[i], 0.0);
            row.mc_mean = estimate_from_payoffs(payoff, Measure::Pstar, 0.0, t, s);
            for (std::size_t i = 0; i < claims.size(); ++i)
                payoff[i] = std::max(claims[i] - sl_retention, 0.0);
            row.mc_stop_loss =
                estimate_from_payoffs(payoff, Measure::Pstar, sl_retention, t, s);
        } catch (const Error& err) {
            row.skipped = true;
            row.skip_reason = err.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace cdcp
