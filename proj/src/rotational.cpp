#include "orbinspect/rotational.hpp"

#include "orbinspect/errors.hpp"

#include <cmath>

namespace orbinspect::attitude {
namespace {

struct Derivative {
    Eigen::Vector4d q;
    Vec3 omega;
};

Derivative rates(const Eigen::Vector4d& q, const Vec3& omega, const InertiaDiag& inertia) {
    const Quaternion quat(q[0], q[1], q[2], q[3]);
    return {quat_derivative(quat, omega), euler_derivative(omega, inertia)};
}

Eigen::Vector4d to_vec(const Quaternion& q) { return {q.w(), q.x(), q.y(), q.z()}; }

}  // namespace

void InertiaDiag::validate() const {
    if (!(xx > 0.0 && yy > 0.0 && zz > 0.0)) throw ConfigError("inertia: moments must be positive");
    if (xx + yy < zz || yy + zz < xx || xx + zz < yy)
        throw ConfigError("inertia: principal moments violate the triangle inequality");
}

Vec3 preset_omega(DynamicMode mode, double mean_motion) {
    switch (mode) {
        case DynamicMode::StaticHill: return {0.0, 0.0, mean_motion};
        case DynamicMode::StaticEci: return {0.0, 0.0, 0.0};
        case DynamicMode::SingleAxis: return {0.0, 0.0, 0.097};
        case DynamicMode::StableTumble: return {0.0097, 0.097, 0.0};
        case DynamicMode::ChaoticTumble: return {0.0097, 0.0, 0.097};
    }
    return Vec3::Zero();
}

std::string_view to_string(DynamicMode mode) {
    switch (mode) {
        case DynamicMode::StaticHill: return "static-hill";
        case DynamicMode::StaticEci: return "static-eci";
        case DynamicMode::SingleAxis: return "single-axis";
        case DynamicMode::StableTumble: return "stable-tumble";
        case DynamicMode::ChaoticTumble: return "chaotic-tumble";
    }
    return "unknown";
}

std::optional<DynamicMode> parse_mode(std::string_view name) {
    for (DynamicMode m : kAllModes) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

Vec3 euler_derivative(const Vec3& w, const InertiaDiag& inertia) {
    return {(inertia.yy - inertia.zz) * w.y() * w.z() / inertia.xx,
            (inertia.zz - inertia.xx) * w.x() * w.z() / inertia.yy,
            (inertia.xx - inertia.yy) * w.x() * w.y() / inertia.zz};
}

Eigen::Vector4d quat_derivative(const Quaternion& q, const Vec3& w) {
    const Quaternion p = q * Quaternion(0.0, w.x(), w.y(), w.z());
    return 0.5 * Eigen::Vector4d(p.w(), p.x(), p.y(), p.z());
}

namespace {

AttitudeState rk4_step(const AttitudeState& state, double dt, const InertiaDiag& inertia) {
    const Eigen::Vector4d q0 = to_vec(state.q_bf_eci);
    const Vec3& w0 = state.omega_bf;

    const Derivative k1 = rates(q0, w0, inertia);
    const Derivative k2 = rates(q0 + 0.5 * dt * k1.q, w0 + 0.5 * dt * k1.omega, inertia);
    const Derivative k3 = rates(q0 + 0.5 * dt * k2.q, w0 + 0.5 * dt * k2.omega, inertia);
    const Derivative k4 = rates(q0 + dt * k3.q, w0 + dt * k3.omega, inertia);

    const Eigen::Vector4d q = q0 + dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    const Vec3 w = w0 + dt / 6.0 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega);

    AttitudeState out;
    out.q_bf_eci = Quaternion(q[0], q[1], q[2], q[3]).normalized();
    out.omega_bf = w;
    return out;
}

}  // namespace

AttitudeState step_attitude(const AttitudeState& state, double dt, const InertiaDiag& inertia,
                            double max_substep) {
    if (!(dt > 0.0)) return state;
    const int substeps = max_substep > 0.0 ? std::max(1, static_cast<int>(std::ceil(dt / max_substep - 1e-12))) : 1;
    const double h = dt / substeps;
    AttitudeState out = state;
    for (int i = 0; i < substeps; ++i) out = rk4_step(out, h, inertia);
    return out;
}

Quaternion hill_from_eci(double t, const orbit::OrbitParams& params) {
    return Quaternion(Eigen::AngleAxisd(-params.mean_motion * t, Vec3::UnitZ()));
}

HillAttitude attitude_in_hill(const AttitudeState& state, double t, const orbit::OrbitParams& params) {
    HillAttitude out;
    out.q_bf_hill = hill_from_eci(t, params) * state.q_bf_eci;
    out.omega_hill = out.q_bf_hill * state.omega_bf - Vec3(0.0, 0.0, params.mean_motion);
    return out;
}

double kinetic_energy(const Vec3& w, const InertiaDiag& inertia) {
    return 0.5 * w.dot(inertia.diagonal().cwiseProduct(w));
}

double momentum_magnitude(const Vec3& w, const InertiaDiag& inertia) {
    return inertia.diagonal().cwiseProduct(w).norm();
}

AttitudeTimeline::AttitudeTimeline(AttitudeState initial, InertiaDiag inertia, double dt)
    : inertia_(inertia), dt_(dt) {
    if (!(dt > 0.0)) throw ConfigError("attitude timeline step must be positive");
    samples_.push_back(initial);
}

AttitudeState AttitudeTimeline::at(double t) {
    if (t < 0.0) t = 0.0;
    const auto k = static_cast<std::size_t>(std::floor(t / dt_));
    while (samples_.size() <= k) samples_.push_back(step_attitude(samples_.back(), dt_, inertia_));
    const double rem = t - static_cast<double>(k) * dt_;
    if (rem <= 0.0) return samples_[k];
    return step_attitude(samples_[k], rem, inertia_);
}

}  // namespace orbinspect::attitude
