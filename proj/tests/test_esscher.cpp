#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "cdcp/esscher.hpp"
#include "cdcp/errors.hpp"
#include "cdcp/simulate.hpp"
#include "oracles.hpp"

using namespace cdcp;

namespace {

PhysicalModel table_model() { return PhysicalModel{}; }  // the shipped defaults

EsscherParams table_esscher() { return EsscherParams{1.25, 1.25, -0.05, 0.01}; }

bool throws_code(ErrorCode code, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

}  // namespace

TEST_CASE("f1: value at zero, slope, and root") {
    auto m = table_model();
    auto e = table_esscher();
    CHECK(f1(0.0, m, e) == doctest::Approx(0.0).epsilon(1e-15));

    // slope at 0 by central finite difference vs delta - theta*jhat*mu_G
    const double h = 1e-6;
    const double slope = (f1(h, m, e) - f1(-h, m, e)) / (2.0 * h);
    const double expected = 3.0 - 1.25 * std::pow(0.4 / 0.35, 3) * 1.0;
    CHECK(slope == doctest::Approx(expected).epsilon(1e-6));
    CHECK(expected > 0.0);

    // root by an independent coarse scan + bisection in the test
    double lo = 0.1, hi = 0.9;
    while (f1(lo, m, e) <= 0.0) lo += 0.01;
    while (f1(hi, m, e) > 0.0) hi -= 0.01;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f1(mid, m, e) > 0.0 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(0.37804).epsilon(2e-5));
}

TEST_CASE("b_plus: closed form, bisection agreement, boundary") {
    auto m = table_model();
    auto e = table_esscher();
    const double bp = b_plus(m, e);
    CHECK(bp == doctest::Approx(1.0 - 1.25 * std::pow(0.4 / 0.35, 3) / 3.0)
                    .epsilon(1e-14));
    CHECK(bp == doctest::Approx(0.37804).epsilon(2e-5));
    CHECK(std::abs(bp - b_plus_bisection(m, e)) < 1e-10);

    // theta=1, nu=0 identity: jhat=1, B+ = beta - 1/delta = 2/3
    EsscherParams id{1.0, 1.0, 0.0, 0.01};
    CHECK(b_plus(m, id) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    // exact boundary delta*beta = theta*jhat(nu)
    EsscherParams bad = e;
    bad.theta = 3.0 / e.jhat(m);  // delta*beta / jhat
    CHECK(throws_code(ErrorCode::NoPositiveRoot, [&] { b_plus(m, bad); }));
}

TEST_CASE("g_of_B: boundary value, domain, divergence near B+") {
    auto m = table_model();
    auto e = table_esscher();
    CHECK(g_of_B(e.b, m, e) == 0.0);
    CHECK(throws_code(ErrorCode::OutOfDomain, [&] { g_of_B(e.b / 2.0, m, e); }));
    CHECK(throws_code(ErrorCode::OutOfDomain,
                      [&] { g_of_B(b_plus(m, e), m, e); }));

    const double bp = b_plus(m, e);
    const double g1 = g_of_B(bp * (1.0 - 1e-3), m, e);
    const double g2 = g_of_B(bp * (1.0 - 1e-4), m, e);
    CHECK(g1 > 3.0);       // far beyond the unit horizon already
    CHECK(g2 > g1 + 1.0);  // and still growing logarithmically
}

TEST_CASE("solve_B: initial value, monotone, bounded, RK4 oracle") {
    auto m = table_model();
    auto e = table_esscher();
    BCurve bc = solve_B(m, e, 1.0, 2000);
    CHECK(bc.values.front() == e.b);
    CHECK(bc.grid.front() == 0.0);
    CHECK(bc.grid.back() == 1.0);
    const double bp = b_plus(m, e);
    for (std::size_t i = 1; i < bc.values.size(); ++i) {
        CHECK(bc.values[i] > bc.values[i - 1]);
        CHECK(bc.values[i] < bp);
    }

    // independent fixed-step RK4 oracle at step 1e-4, b = 1e-6
    EsscherParams tiny = e;
    tiny.b = 1e-6;
    BCurve bc2 = solve_B(m, tiny, 1.0, 2000);
    const double oracle = oracles::rk4_solve(
        [&](double B) { return f1(B, m, tiny); }, 1e-6, 1.0, 1e-4);
    CHECK(bc2.values.back() > 0.0);
    CHECK(bc2.values.back() < 0.37804);
    CHECK(std::abs(bc2.values.back() - oracle) < 1e-6);

    // inverse identity at interior times
    for (double t : {0.1, 0.5, 1.0})
        CHECK(std::abs(g_of_B(bc.at(t), m, e) - t) < 1e-6);
}

TEST_CASE("solve_B: near-zero tilt gives a near-zero curve") {
    auto m = table_model();
    EsscherParams id{1.0, 1.0, 0.0, 1e-9};
    BCurve bc = solve_B(m, id, 1.0, 1000);
    for (double v : bc.values) CHECK(v < 1e-7);
}

TEST_CASE("solve_B: too-coarse grid is rejected") {
    auto m = table_model();
    auto e = table_esscher();
    CHECK(throws_code(ErrorCode::GridTooCoarse,
                      [&] { solve_B(m, e, 1.0, 2, 1e-12); }));
}

TEST_CASE("classify_regime across alpha") {
    auto m = table_model();
    auto e = table_esscher();
    BCurve bc = solve_B(m, e, 1.0, 500);
    CHECK(bc.regime.type == RegimeType::Type1);  // alpha=2 >= B+~0.378

    PhysicalModel m2 = m;
    m2.H = JumpDist::exponential(0.2);  // alpha in (b, B+)
    BCurve bc2 = solve_B(m2, e, 1.0, 500);
    CHECK(bc2.regime.type == RegimeType::Type2);
    // t* against a test-side quadrature of 1/f1 over [b, alpha]
    const double tstar_oracle =
        oracles::quad([&](double u) { return 1.0 / f1(u, m2, e); }, e.b, 0.2, 1e-13);
    CHECK(bc2.regime.t_star.value() == doctest::Approx(tstar_oracle).epsilon(1e-8));

    PhysicalModel m3 = m;
    m3.H = JumpDist::exponential(e.b / 2.0);  // alpha <= b
    BCurve bc3 = solve_B(m3, e, 1.0, 500);
    CHECK(bc3.regime.type == RegimeType::Type3);
}

TEST_CASE("solve_K: boundary, trapezoid oracle, vanishing case") {
    auto m = table_model();
    auto e = table_esscher();
    BCurve bc = solve_B(m, e, 1.0, 2000);
    KCurve kc = solve_K(m, e, bc);
    CHECK(kc.values.front() == 0.0);

    // trapezoid oracle at half grid spacing on the same integrand
    auto integrand = [&](double t) {
        const double B = bc.at(t);
        return -m.a * m.delta * B - m.rho * (e.psi * m.H.laplace(-B) - 1.0);
    };
    const std::size_t n = 8000;
    double acc = 0.0;
    const double h = 1.0 / n;
    for (std::size_t i = 0; i < n; ++i)
        acc += 0.5 * h * (integrand(i * h) + integrand((i + 1) * h));
    CHECK(std::abs(kc.values.back() - acc) < 1e-6);

    // a=0, psi=1, theta=1, nu=0, b->0: both integrands vanish
    PhysicalModel m0 = m;
    m0.a = 0.0;
    EsscherParams id{1.0, 1.0, 0.0, 1e-9};
    BCurve bc0 = solve_B(m0, id, 1.0, 500);
    KCurve kc0 = solve_K(m0, id, bc0);
    for (double v : kc0.values) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("tilt_model: identity parameters reproduce the physical model") {
    auto m = table_model();
    EsscherParams id{1.0, 1.0, 0.0, 1e-9};
    BCurve bc = solve_B(m, id, 1.0, 500);
    TiltedModel tm = tilt_model(m, id, bc);
    for (double t : {0.0, 0.3, 0.7, 1.0}) {
        CHECK(tm.rate_multiplier(t) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(tm.external_rate(t) == doctest::Approx(m.rho).epsilon(1e-6));
        CHECK(tm.level(t) == doctest::Approx(m.a).epsilon(1e-6));
        CHECK(tm.external_jumps(t).rate() ==
              doctest::Approx(m.H.rate()).epsilon(1e-6));
        CHECK(tm.self_jumps(t).rate() == doctest::Approx(m.G.rate()).epsilon(1e-6));
    }
    CHECK(tm.claims().rate() == m.J.rate());
}

TEST_CASE("tilt_model: table-parameter transforms") {
    auto m = table_model();
    EsscherParams e = table_esscher();
    e.b = 1e-6;
    BCurve bc = solve_B(m, e, 1.0, 1000);
    TiltedModel tm = tilt_model(m, e, bc);
    // rho~(0) = psi * (alpha/(alpha-b)) * rho ~= 5
    CHECK(tm.external_rate(0.0) ==
          doctest::Approx(1.25 * (2.0 / (2.0 - 1e-6)) * 4.0).epsilon(1e-9));
    CHECK(tm.external_rate(0.0) == doctest::Approx(5.0).epsilon(1e-6));
    // claims Gamma(0.35, 3), mean 8.5714...
    CHECK(tm.claims().rate() == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(tm.claims().shape() == 3.0);
    CHECK(tm.claim_mean() == doctest::Approx(3.0 / 0.35).epsilon(1e-12));
    // lambda-space view differs only by the scale factor c(t)
    TiltedModel lam = tm.with_representation(TiltRepresentation::Lambda);
    for (double t : {0.0, 0.5, 1.0}) {
        CHECK(lam.self_jumps(t).rate() ==
              doctest::Approx(tm.self_jumps(t).rate() * tm.rate_multiplier(t))
                  .epsilon(1e-12));
        CHECK(lam.level(t) == m.a);
    }
}

TEST_CASE("tilt_model: regime/horizon guards") {
    auto m = table_model();
    auto e = table_esscher();
    PhysicalModel m2 = m;
    m2.H = JumpDist::exponential(0.2);
    BCurve bc2 = solve_B(m2, e, 1.0, 500);
    REQUIRE(bc2.regime.type == RegimeType::Type2);
    const double tstar = bc2.regime.t_star.value();
    CHECK(tstar > 1.0);  // feasible at horizon 1
    CHECK_NOTHROW(tilt_model(m2, e, bc2));

    BCurve bc_long = solve_B(m2, e, tstar + 0.5, 4000);
    CHECK(throws_code(ErrorCode::HorizonExceedsRegime,
                      [&] { tilt_model(m2, e, bc_long); }));

    PhysicalModel m3 = m;
    m3.H = JumpDist::exponential(e.b / 2.0);
    BCurve bc3 = solve_B(m3, e, 0.5, 500);
    CHECK(throws_code(ErrorCode::HorizonExceedsRegime,
                      [&] { tilt_model(m3, e, bc3); }));
}

TEST_CASE("stationarity report under the tilt") {
    auto m = table_model();
    auto e = table_esscher();
    BCurve bc = solve_B(m, e, 1.0, 500);
    TiltedModel tm = tilt_model(m, e, bc);
    auto rep = tm.stationarity();
    CHECK(rep.holds_full);
    CHECK(rep.holds_displayed);
    CHECK(rep.worst_margin_full < rep.worst_margin_displayed);  // jhat >= single power

    // long horizon pushes B high enough that the tilted condition fails
    EsscherParams e2 = e;
    e2.b = 0.1;
    BCurve bc2 = solve_B(m, e2, 3.0, 6000);
    TiltedModel tm2 = tilt_model(m, e2, bc2);
    CHECK_FALSE(tm2.stationarity().holds_full);
}

TEST_CASE("martingale statistic: closed forms at t=0 and one-event paths") {
    auto m = table_model();
    auto e = table_esscher();
    BCurve bc = solve_B(m, e, 1.0, 1000);
    KCurve kc = solve_K(m, e, bc);

    SimPath path;
    path.horizon = 1.0;
    path.base = DeterministicBase::constant(m.lambda0, m.delta, m.a);
    CHECK(martingale_statistic(path, m, e, bc, kc, 0.0) ==
          doctest::Approx(std::exp(e.b * m.lambda0)).epsilon(1e-12));

    // one self event, no external events: direct formula instantiation
    path.self_events.push_back({0.4, 0.8, 5.0});
    const double t = 0.7;
    const double lam = m.a + (m.lambda0 - m.a) * std::exp(-m.delta * t) +
                       0.8 * std::exp(-m.delta * (t - 0.4));
    const double Lam = m.a * t +
                       (m.lambda0 - m.a) * (1.0 - std::exp(-m.delta * t)) / m.delta +
                       0.8 / m.delta * (1.0 - std::exp(-m.delta * (t - 0.4)));
    const double expected = std::exp(kc.at(t)) * e.theta *
                            std::exp(bc.at(t) * lam) * std::exp(-e.nu * 5.0) *
                            std::exp(e.phi(m) * Lam);
    CHECK(martingale_statistic(path, m, e, bc, kc, t) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("martingale statistic: overflow is signalled, log form stays usable") {
    auto m = table_model();
    auto e = table_esscher();
    BCurve bc = solve_B(m, e, 1.0, 1000);
    KCurve kc = solve_K(m, e, bc);
    SimPath path;
    path.horizon = 1.0;
    path.base = DeterministicBase::constant(m.lambda0, m.delta, m.a);
    // a gigantic intensity mark right at the evaluation time: B(t)*lambda_t
    // exceeds the exponent range while Lambda_t is still unaffected
    path.self_events.push_back({0.5, 1e5, 1.0});
    CHECK(throws_code(ErrorCode::Overflow, [&] {
        martingale_statistic(path, m, e, bc, kc, 0.5);
    }));
    const double logstat = log_martingale_statistic(path, m, e, bc, kc, 0.5);
    CHECK(std::isfinite(logstat));
    CHECK(logstat > 700.0);
}

TEST_CASE("martingale statistic: empirical mean matches e^{b lambda0}") {
    auto m = table_model();
    auto e = table_esscher();
    BCurve bc = solve_B(m, e, 0.5, 1000);
    KCurve kc = solve_K(m, e, bc);
    const std::size_t n = 20000;
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(424242, i);
        SimPath p = simulate_cdcp(m, 0.5, 0.1, rng);
        vals[i] = martingale_statistic(p, m, e, bc, kc, 0.5);
    }
    auto ms = oracles::mean_stderr(vals);
    CHECK(std::abs(ms.mean - std::exp(e.b * m.lambda0)) < 3.0 * ms.stderr_);
}
