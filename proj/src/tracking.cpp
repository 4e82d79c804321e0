#include "fdia_lab/tracking.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace fdia_lab {

void RefConfig::validate() const
{
    if (!(v_ref > 0)) throw std::invalid_argument("RefConfig: v_ref must be positive");
    if (!(omega_period > 0)) throw std::invalid_argument("RefConfig: omega_period must be positive");
    if (!(duration >= 0) || !std::isfinite(duration)) throw std::invalid_argument("RefConfig: duration must be finite and nonnegative");
    if (!(dt > 0)) throw std::invalid_argument("RefConfig: dt must be positive");
    if (!std::isfinite(omega_amp)) throw std::invalid_argument("RefConfig: omega_amp must be finite");
}

ReferenceTrajectory::ReferenceTrajectory(const RefConfig& cfg) : cfg_(cfg)
{
    cfg_.validate();
    const auto last = static_cast<std::size_t>(std::llround(cfg_.duration / cfg_.dt));
    poses_.reserve(last + 1);
    poses_.push_back(Posture{});
    for (std::size_t k = 0; k < last; ++k) {
        poses_.push_back(rk4_step(poses_.back(), feedforward(static_cast<double>(k) * cfg_.dt), cfg_.dt));
    }
}

BodyVelocity ReferenceTrajectory::feedforward(double t) const
{
    return {cfg_.v_ref, cfg_.omega_amp * std::sin(2.0 * std::numbers::pi * t / cfg_.omega_period)};
}

RefSample ReferenceTrajectory::at_tick(std::size_t k) const
{
    if (k >= poses_.size()) {
        throw std::out_of_range("ReferenceTrajectory: tick " + std::to_string(k) + " beyond table");
    }
    return {poses_[k], feedforward(static_cast<double>(k) * cfg_.dt)};
}

RefSample ReferenceTrajectory::sample(double t) const
{
    if (!(t >= 0.0) || t > cfg_.duration + 1e-12) {
        throw std::out_of_range("ReferenceTrajectory: t outside [0, duration]");
    }
    const double s = t / cfg_.dt;
    auto k = static_cast<std::size_t>(std::floor(s + 1e-9));
    if (k >= poses_.size()) k = poses_.size() - 1;
    const double h = t - static_cast<double>(k) * cfg_.dt;
    if (h <= 1e-12) return at_tick(k);
    const BodyVelocity held = feedforward(static_cast<double>(k) * cfg_.dt);
    return {rk4_step(poses_[k], held, h), feedforward(t)};
}

RefSample gen_reference(const ReferenceTrajectory& ref, double t) { return ref.sample(t); }

}  // namespace fdia_lab
