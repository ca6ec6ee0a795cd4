#include "cdcp/model.hpp"

#include <cmath>

#include "cdcp/errors.hpp"

namespace cdcp {

void PhysicalModel::validate() const {
    if (!(lambda0 > 0.0)) fail(ErrorCode::ConfigInvalid, "lambda0 must be > 0");
    if (!(a >= 0.0)) fail(ErrorCode::ConfigInvalid, "a must be >= 0");
    if (!(delta > 0.0)) fail(ErrorCode::ConfigInvalid, "delta must be > 0");
    if (!(rho > 0.0)) fail(ErrorCode::ConfigInvalid, "rho must be > 0");
    if (!std::isfinite(kappa()))
        fail(ErrorCode::ConfigInvalid, "kappa = delta - mean(G) must be finite");
}

void EsscherParams::validate(const PhysicalModel& m) const {
    if (!(theta >= 1.0)) fail(ErrorCode::ConfigInvalid, "theta must be >= 1");
    if (!(psi >= 1.0)) fail(ErrorCode::ConfigInvalid, "psi must be >= 1");
    if (!(b > 0.0)) fail(ErrorCode::ConfigInvalid, "b must be > 0");
    if (m.J.kind() != JumpKind::Gamma)
        fail(ErrorCode::ConfigInvalid, "claim tilting requires gamma claim sizes");
    const double gamma_rate = m.J.rate();
    if (!(nu > -gamma_rate) || nu > 0.0)
        fail(ErrorCode::InvalidTilt,
             "nu must lie in (-gamma, 0] = (-" + std::to_string(gamma_rate) +
                 ", 0], got " + std::to_string(nu));
    if (!(m.delta * m.G.rate() > theta * jhat(m)))
        fail(ErrorCode::NoPositiveRoot,
             "need delta*beta > theta*jhat(nu) for a positive root B+");
}

}  // namespace cdcp
