#pragma once

#include "cdcp/distributions.hpp"

namespace cdcp {

enum class Measure { P, Pstar };

// Time-homogeneous compound dynamic contagion model under the physical
// measure: intensity decays at rate delta toward level a, jumps by H-marks at
// external (Poisson rho) events and by G-marks at its own events; claims are
// i.i.d. J-marks attached to self events.
struct PhysicalModel {
    double lambda0 = 1.0;                          // initial intensity
    double a = 1.0;                                // mean-reversion level (>= 0)
    double delta = 3.0;                            // exponential decay rate
    double rho = 4.0;                              // external arrival rate
    JumpDist G = JumpDist::exponential(1.0);       // self-excited intensity jumps
    JumpDist H = JumpDist::exponential(2.0);       // externally excited intensity jumps
    JumpDist J = JumpDist::gamma(0.4, 3.0);        // claim sizes

    double kappa() const { return delta - G.mean(); }
    bool stationary() const { return kappa() > 0.0; }

    // throws ConfigInvalid on violated invariants
    void validate() const;
};

// Esscher tilting parameters. phi is always derived, never stored.
struct EsscherParams {
    double theta = 1.0;  // tilt on self-event counts, >= 1
    double psi = 1.0;    // tilt on external-event counts, >= 1
    double nu = 0.0;     // tilt on claim sizes, in (-gamma, 0]; 0 = identity
    double b = 0.01;     // initial ODE condition B(0)

    double jhat(const PhysicalModel& m) const { return m.J.laplace(nu); }
    double phi(const PhysicalModel& m) const { return -(theta * jhat(m) - 1.0); }

    void validate(const PhysicalModel& m) const;
};

}  // namespace cdcp
