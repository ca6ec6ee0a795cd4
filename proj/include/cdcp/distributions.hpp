#pragma once

#include <string>

#include "cdcp/rng.hpp"

namespace cdcp {

enum class JumpKind { Exponential, Gamma };

// Positive jump-size distribution (exponential or gamma), immutable after
// construction. Carries the exact mean/Laplace transform plus the exponential
// tilts used by the measure change. Gamma shape is real-valued >= 1.
class JumpDist {
public:
    static JumpDist exponential(double rate);
    static JumpDist gamma(double rate, double shape);

    JumpKind kind() const { return kind_; }
    double rate() const { return rate_; }
    double shape() const { return shape_; }

    double mean() const;

    // E[e^{-sX}]; finite only for s > -rate
    double laplace(double s) const;

    double density(double x) const;

    double sample(RngStream& rng) const;

    // Gamma(gamma, eta) -> Gamma(gamma + nu, eta), nu in (-gamma, 0]
    JumpDist tilt_claim(double nu) const;

    // dD~(x) proportional to e^{Bx} dD(x); exponential only, B < rate
    JumpDist exp_tilt(double B) const;

    // law of c*X for X ~ this, c > 0
    JumpDist scale(double c) const;

    std::string describe() const;

private:
    JumpDist(JumpKind kind, double rate, double shape);

    JumpKind kind_;
    double rate_;
    double shape_;
};

}  // namespace cdcp
