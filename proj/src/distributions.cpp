#include "cdcp/distributions.hpp"

#include <cmath>
#include <sstream>

#include "cdcp/errors.hpp"

namespace cdcp {

JumpDist::JumpDist(JumpKind kind, double rate, double shape)
    : kind_(kind), rate_(rate), shape_(shape) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        fail(ErrorCode::ConfigInvalid, "jump distribution rate must be positive");
    if (!(shape >= 1.0) || !std::isfinite(shape))
        fail(ErrorCode::ConfigInvalid, "jump distribution shape must be >= 1");
    if (kind == JumpKind::Exponential && shape != 1.0)
        fail(ErrorCode::ConfigInvalid, "exponential jump distribution has shape 1");
}

JumpDist JumpDist::exponential(double rate) {
    return JumpDist(JumpKind::Exponential, rate, 1.0);
}

JumpDist JumpDist::gamma(double rate, double shape) {
    return JumpDist(JumpKind::Gamma, rate, shape);
}

double JumpDist::mean() const { return shape_ / rate_; }

double JumpDist::laplace(double s) const {
    if (s <= -rate_)
        fail(ErrorCode::DivergentTransform,
             "laplace(s) diverges for s <= -rate (s=" + std::to_string(s) +
                 ", rate=" + std::to_string(rate_) + ")");
    if (kind_ == JumpKind::Exponential) return rate_ / (rate_ + s);
    return std::pow(rate_ / (rate_ + s), shape_);
}

double JumpDist::density(double x) const {
    if (x <= 0.0) return 0.0;
    if (kind_ == JumpKind::Exponential) return rate_ * std::exp(-rate_ * x);
    return std::exp(shape_ * std::log(rate_) + (shape_ - 1.0) * std::log(x) -
                    rate_ * x - std::lgamma(shape_));
}

double JumpDist::sample(RngStream& rng) const {
    if (kind_ == JumpKind::Exponential) return rng.exponential(rate_);
    return rng.gamma(shape_, rate_);
}

JumpDist JumpDist::tilt_claim(double nu) const {
    if (kind_ != JumpKind::Gamma)
        fail(ErrorCode::InvalidTilt, "claim tilt is defined for gamma claims");
    if (nu <= -rate_ || nu > 0.0)
        fail(ErrorCode::InvalidTilt,
             "claim tilt requires nu in (-" + std::to_string(rate_) + ", 0], got " +
                 std::to_string(nu));
    return JumpDist::gamma(rate_ + nu, shape_);
}

JumpDist JumpDist::exp_tilt(double B) const {
    if (kind_ != JumpKind::Exponential)
        fail(ErrorCode::InvalidTilt, "exponential tilt is defined for exponential jumps");
    if (B >= rate_)
        fail(ErrorCode::InvalidTilt,
             "exponential tilt requires B < rate (B=" + std::to_string(B) +
                 ", rate=" + std::to_string(rate_) + ")");
    return JumpDist::exponential(rate_ - B);
}

JumpDist JumpDist::scale(double c) const {
    if (!(c > 0.0)) fail(ErrorCode::ConfigInvalid, "scale factor must be positive");
    return JumpDist(kind_, rate_ / c, shape_);
}

std::string JumpDist::describe() const {
    std::ostringstream os;
    if (kind_ == JumpKind::Exponential)
        os << "Exponential(" << rate_ << ")";
    else
        os << "Gamma(" << rate_ << ", " << shape_ << ")";
    return os.str();
}

}  // namespace cdcp
