#include "orbinspect/orbital.hpp"

#include "orbinspect/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace orbinspect::orbit {
namespace {

// 1 - cos(t) without cancellation.
double one_minus_cos(double t) {
    const double h = std::sin(0.5 * t);
    return 2.0 * h * h;
}

// t - sin(t) without cancellation for small t.
double t_minus_sin(double t) {
    if (std::abs(t) < 1e-2) {
        const double t2 = t * t;
        return t * t2 * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 / 5040.0));
    }
    return t - std::sin(t);
}

struct TransferTerms {
    double theta, s, c, d;
};

TransferTerms transfer_terms(const TransferSpec& spec, const OrbitParams& params) {
    const SingularityCheck check = check_tof_singularity(spec, params);
    if (!check) throw SingularTransfer(check.message);
    const double theta = params.mean_motion * spec.tof;
    return {theta, check.s, std::cos(theta), check.d};
}

}  // namespace

void OrbitParams::validate() const {
    if (!(mean_motion > 0.0) || !std::isfinite(mean_motion))
        throw ConfigError("orbit: mean_motion must be positive");
    if (!(orbital_radius_km > 0.0)) throw ConfigError("orbit: orbital_radius_km must be positive");
    if (!(agent_mass > 0.0)) throw ConfigError("orbit: agent_mass must be positive");
}

double OrbitParams::period() const { return 2.0 * std::numbers::pi / mean_motion; }

Vec6 HillState::stacked() const {
    Vec6 x;
    x << position, velocity;
    return x;
}

HillState HillState::from_stacked(const Vec6& x) {
    return {x.head<3>(), x.tail<3>()};
}

Vec6 cwh_derivative(const HillState& state, const ThrustCommand& thrust, const OrbitParams& params) {
    const double n = params.mean_motion;
    const Vec3& r = state.position;
    const Vec3& v = state.velocity;
    const Vec3 a = thrust.force / params.agent_mass;
    Vec6 dx;
    dx << v, 3.0 * n * n * r.x() + 2.0 * n * v.y() + a.x(), -2.0 * n * v.x() + a.y(),
        -n * n * r.z() + a.z();
    return dx;
}

Mat6 state_transition(double dt, double n) {
    const double t = n * dt;
    const double s = std::sin(t);
    const double c = std::cos(t);
    const double omc = one_minus_cos(t);
    const double tms = t_minus_sin(t);

    Mat6 phi = Mat6::Zero();
    phi(0, 0) = 1.0 + 3.0 * omc;
    phi(0, 3) = s / n;
    phi(0, 4) = 2.0 * omc / n;
    phi(1, 0) = -6.0 * tms;
    phi(1, 1) = 1.0;
    phi(1, 3) = -2.0 * omc / n;
    phi(1, 4) = (s - 3.0 * tms) / n;
    phi(2, 2) = c;
    phi(2, 5) = s / n;
    phi(3, 0) = 3.0 * n * s;
    phi(3, 3) = c;
    phi(3, 4) = 2.0 * s;
    phi(4, 0) = -6.0 * n * omc;
    phi(4, 3) = -2.0 * s;
    phi(4, 4) = 1.0 - 4.0 * omc;
    phi(5, 2) = -n * s;
    phi(5, 5) = c;
    return phi;
}

Eigen::Matrix<double, 6, 3> thrust_input_matrix(double dt, const OrbitParams& params) {
    const double n = params.mean_motion;
    const double t = n * dt;
    const double s = std::sin(t);
    const double omc = one_minus_cos(t);
    const double tms = t_minus_sin(t);
    const double n2 = n * n;

    Eigen::Matrix<double, 6, 3> g = Eigen::Matrix<double, 6, 3>::Zero();
    g(0, 0) = omc / n2;
    g(0, 1) = 2.0 * tms / n2;
    g(1, 0) = -2.0 * tms / n2;
    g(1, 1) = 4.0 * omc / n2 - 1.5 * dt * dt;
    g(2, 2) = omc / n2;
    g(3, 0) = s / n;
    g(3, 1) = 2.0 * omc / n;
    g(4, 0) = -2.0 * omc / n;
    g(4, 1) = (s - 3.0 * tms) / n;
    g(5, 2) = s / n;
    return g / params.agent_mass;
}

HillState propagate(const HillState& state, const ThrustCommand& thrust, double dt,
                    const OrbitParams& params) {
    Vec6 x = state_transition(dt, params.mean_motion) * state.stacked();
    if (!thrust.force.isZero(0.0)) x += thrust_input_matrix(dt, params) * thrust.force;
    return HillState::from_stacked(x);
}

SingularityCheck check_tof_singularity(const TransferSpec& spec, const OrbitParams& params) {
    SingularityCheck out;
    if (!(spec.tof > 0.0) || !std::isfinite(spec.tof)) {
        out.message = "transfer time of flight must be positive and finite";
        return out;
    }
    const double t = params.mean_motion * spec.tof;
    out.s = std::sin(t);
    out.d = 8.0 * one_minus_cos(t) - 3.0 * t * out.s;
    out.ok = std::abs(out.d) >= kMinDenominatorD && std::abs(out.s) >= kMinDenominatorS;
    if (!out.ok) {
        std::ostringstream os;
        os << "singular transfer: nT=" << t << " D=" << out.d << " S=" << out.s;
        out.message = os.str();
    }
    return out;
}

Vec3 nmt_initial_velocity(const TransferSpec& spec, const OrbitParams& params) {
    const auto [t, s, c, d] = transfer_terms(spec, params);
    const double n = params.mean_motion;
    const Vec3& a = spec.start;
    const Vec3& b = spec.end;
    const double omc = one_minus_cos(t);
    return {
        n / d * ((3.0 * t * c - 4.0 * s) * a.x() + 2.0 * omc * a.y() + (4.0 * s - 3.0 * t) * b.x() - 2.0 * omc * b.y()),
        n / d * ((6.0 * t * s - 14.0 * omc) * a.x() - s * a.y() + 2.0 * omc * b.x() + s * b.y()),
        n / s * (-c * a.z() + b.z()),
    };
}

Vec3 nmt_final_velocity(const TransferSpec& spec, const OrbitParams& params) {
    const auto [t, s, c, d] = transfer_terms(spec, params);
    const double n = params.mean_motion;
    const Vec3& a = spec.start;
    const Vec3& b = spec.end;
    const double omc = one_minus_cos(t);
    return {
        n / d * ((3.0 * t - 4.0 * s) * a.x() - 2.0 * omc * a.y() + (4.0 * s - 3.0 * t * c) * b.x() + 2.0 * omc * b.y()),
        n / d * (2.0 * omc * a.x() - s * a.y() + (6.0 * t * s - 14.0 * omc) * b.x() + s * b.y()),
        n / s * (-a.z() + c * b.z()),
    };
}

double transfer_tof(const Vec3& v1, const Vec3& v2, const geometry::ViewpointSet& viewpoints,
                    const OrbitParams& params) {
    if (v1 == v2) return 0.5 * viewpoints.min_pairwise_angle() / params.mean_motion;
    return geometry::angle_between(v1, v2) / params.mean_motion;
}

double transfer_tof(std::size_t from, std::size_t to, const geometry::ViewpointSet& viewpoints,
                    const OrbitParams& params) {
    return transfer_tof(viewpoints.at(from), viewpoints.at(to), viewpoints, params);
}

double transfer_delta_v(const Vec3& v1, const Vec3& v2, const Vec3& current_velocity,
                        const geometry::ViewpointSet& viewpoints, const OrbitParams& params) {
    const TransferSpec spec{v1, v2, transfer_tof(v1, v2, viewpoints, params)};
    return (nmt_initial_velocity(spec, params) - current_velocity).norm();
}

}  // namespace orbinspect::orbit
