#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cdcp/esscher.hpp"
#include "cdcp/model.hpp"
#include "cdcp/rng.hpp"

namespace cdcp {

// Deterministic part of the intensity: the level term plus the decayed
// initial condition, i.e. everything in lambda_t that is not an event mark.
// Supports a constant level (physical model) and a piecewise-linear level on
// a grid (tilted model). Values and running integrals are exact per cell, not
// grid-quadrature: the martingale statistic is exponentially sensitive to
// errors in the integrated intensity.
class DeterministicBase {
public:
    static DeterministicBase constant(double lambda0, double delta, double a);
    static DeterministicBase from_grid(double lambda0, double delta,
                                       std::vector<double> grid,
                                       std::vector<double> level);

    double delta() const { return delta_; }
    double lambda0() const { return lambda0_; }

    double value(double t) const;     // level part of lambda_t
    double integral(double t) const;  // int_0^t value(s) ds
    double level(double t) const;
    // sup of the level over [t0, t1]; level is monotone in both model kinds
    double max_level(double t0, double t1) const;

private:
    DeterministicBase() = default;

    double lambda0_ = 0.0;
    double delta_ = 1.0;
    bool constant_ = true;
    double a_const_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> level_;
    std::vector<double> node_value_;     // value(t_i)
    std::vector<double> node_integral_;  // integral(t_i)
    std::size_t cell(double t) const;
};

// One realized path: external events (time, intensity mark), self events
// (time, intensity mark, claim mark), and the captured deterministic base so
// lambda_t, Lambda_t, N_t, M_t, C_t are recomputable at any 0 <= t <= horizon.
struct SimPath {
    struct ExternalEvent {
        double time;
        double mark;
    };
    struct SelfEvent {
        double time;
        double intensity_mark;
        double claim_mark;
    };

    std::vector<ExternalEvent> external_events;
    std::vector<SelfEvent> self_events;
    double horizon = 0.0;
    DeterministicBase base = DeterministicBase::constant(0.0, 1.0, 0.0);

    double lambda_at(double t) const;
    double Lambda_at(double t) const;
    std::size_t N_at(double t) const;  // self-event count
    std::size_t M_at(double t) const;  // external-event count
    double C_at(double t) const;       // aggregate claims

    double total_claims() const;
};

// Thinning sampler for an inhomogeneous Poisson process on [0, T]. rho_max is
// found by grid scan (plus a 1+1e-12 safety factor), so rate must be bounded;
// non-finite values raise UnboundedRate.
std::vector<double> sample_inhomogeneous_poisson(
    double T, const std::function<double(double)>& rate, RngStream& rng,
    std::size_t scan_points = 2048);

// Generic time-inhomogeneous dynamics fed to the thinning simulator. level
// and rate_mult must be monotone in t (true for the physical model, where
// they are constant, and under the tilt, where B(t) is monotone), so local
// dominating bounds can be taken at window endpoints.
struct CdcpDynamics {
    double lambda0 = 0.0;
    double delta = 1.0;
    std::function<double(double)> level;
    std::function<double(double)> ext_rate;
    std::function<JumpDist(double)> ext_jumps;
    std::function<JumpDist(double)> self_jumps;
    JumpDist claims = JumpDist::exponential(1.0);
    std::function<double(double)> rate_mult;  // event-rate multiplier c(t)
};

SimPath simulate_dynamics(const CdcpDynamics& dyn, double T, double dt_max,
                          RngStream& rng, std::size_t level_grid = 512);

SimPath simulate_cdcp(const PhysicalModel& m, double T, double dt_max,
                      RngStream& rng);
SimPath simulate_cdcp(const TiltedModel& tm, double T, double dt_max,
                      RngStream& rng);

// The tilted overload borrows tm by reference inside the returned closures;
// the dynamics must not outlive the model.
CdcpDynamics dynamics_of(const PhysicalModel& m);
CdcpDynamics dynamics_of(const TiltedModel& tm);

}  // namespace cdcp
