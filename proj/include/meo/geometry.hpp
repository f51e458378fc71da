#pragma once

// Earth and equatorial-orbit geometry. Earth is a sphere; everything is
// expressed in the Earth-fixed frame with distances in km.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

namespace meo {

inline constexpr double kEarthRadiusKm = 6378.0;
inline constexpr double kEarthMu = 3.986004418e14;  // m^3/s^2
inline constexpr double kSiderealDaySeconds = 86164.0;

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using EcefVector = Vec3<double>;

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
    return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad2deg(Scalar rad) {
    return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// Wraps a longitude into [-180, 180).
template <typename Scalar>
Scalar wrap_longitude(Scalar deg) {
    Scalar w = std::fmod(deg + Scalar(180), Scalar(360));
    if (w < 0) w += Scalar(360);
    return w - Scalar(180);
}

template <typename Scalar>
struct SurfacePointT {
    Scalar lat_deg{0};
    Scalar lon_deg{0};

    friend bool operator==(const SurfacePointT&, const SurfacePointT&) = default;
};

using SurfacePoint = SurfacePointT<double>;

template <typename Scalar>
bool is_valid(const SurfacePointT<Scalar>& p) {
    return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) && p.lat_deg >= -90 && p.lat_deg <= 90 &&
           p.lon_deg >= -180 && p.lon_deg <= 180;
}

template <typename Scalar>
Vec3<Scalar> to_ecef(const SurfacePointT<Scalar>& p, Scalar radius = Scalar(kEarthRadiusKm)) {
    const Scalar lat = deg2rad(p.lat_deg);
    const Scalar lon = deg2rad(p.lon_deg);
    return radius * Vec3<Scalar>(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
}

/// Projects an arbitrary non-zero vector radially onto the surface.
template <typename Derived>
SurfacePointT<typename Derived::Scalar> to_surface(const Eigen::MatrixBase<Derived>& v) {
    using Scalar = typename Derived::Scalar;
    const Scalar r = v.norm();
    return {rad2deg(std::asin(std::clamp(v.z() / r, Scalar(-1), Scalar(1)))), rad2deg(std::atan2(v.y(), v.x()))};
}

/// Angle between two vectors. atan2(|a x b|, a.b) stays accurate for nearly
/// parallel vectors where acos of a clamped cosine loses half the digits.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar vector_angle(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Great-circle distance along the surface, km.
template <typename Scalar>
Scalar great_circle_distance(const SurfacePointT<Scalar>& a, const SurfacePointT<Scalar>& b) {
    return Scalar(kEarthRadiusKm) * vector_angle(to_ecef(a, Scalar(1)), to_ecef(b, Scalar(1)));
}

/// Moves `distance_km` along the surface from `origin` in direction `bearing_rad`
/// (clockwise from north).
template <typename Scalar>
SurfacePointT<Scalar> destination_point(const SurfacePointT<Scalar>& origin, Scalar distance_km, Scalar bearing_rad) {
    const Scalar delta = distance_km / Scalar(kEarthRadiusKm);
    const Scalar lat1 = deg2rad(origin.lat_deg);
    const Scalar lon1 = deg2rad(origin.lon_deg);
    const Scalar sin_lat2 = std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(bearing_rad);
    const Scalar lat2 = std::asin(std::clamp(sin_lat2, Scalar(-1), Scalar(1)));
    const Scalar lon2 = lon1 + std::atan2(std::sin(bearing_rad) * std::sin(delta) * std::cos(lat1),
                                          std::cos(delta) - std::sin(lat1) * sin_lat2);
    return {rad2deg(lat2), wrap_longitude(rad2deg(lon2))};
}

// ---------------------------------------------------------------------------
// Orbits

/// Keplerian angular rate of a circular orbit minus Earth rotation, deg/s.
template <typename Scalar>
Scalar relative_longitude_rate(Scalar altitude_km) {
    const Scalar a_m = (Scalar(kEarthRadiusKm) + altitude_km) * Scalar(1000);
    const Scalar period = Scalar(2) * std::numbers::pi_v<Scalar> * std::sqrt(a_m * a_m * a_m / Scalar(kEarthMu));
    return Scalar(360) / period - Scalar(360) / Scalar(kSiderealDaySeconds);
}

template <typename Scalar>
struct SatelliteOrbitT {
    Scalar initial_longitude_deg{0};
    Scalar altitude_km{0};
    Scalar longitude_rate_deg_s{0};

    Scalar radius_km() const { return Scalar(kEarthRadiusKm) + altitude_km; }

    Scalar longitude_at(Scalar t_s) const { return wrap_longitude(initial_longitude_deg + longitude_rate_deg_s * t_s); }

    friend bool operator==(const SatelliteOrbitT&, const SatelliteOrbitT&) = default;
};

using SatelliteOrbit = SatelliteOrbitT<double>;

template <typename Scalar>
SatelliteOrbitT<Scalar> make_orbit(Scalar initial_longitude_deg, Scalar altitude_km) {
    return {initial_longitude_deg, altitude_km, relative_longitude_rate(altitude_km)};
}

template <typename Scalar>
Vec3<Scalar> orbit_point(Scalar radius_km, Scalar longitude_rad) {
    return Vec3<Scalar>(radius_km * std::cos(longitude_rad), radius_km * std::sin(longitude_rad), Scalar(0));
}

template <typename Scalar>
Vec3<Scalar> satellite_position(const SatelliteOrbitT<Scalar>& orbit, Scalar t_s) {
    return orbit_point(orbit.radius_km(), deg2rad(orbit.longitude_at(t_s)));
}

// ---------------------------------------------------------------------------
// Link geometry

template <typename Scalar>
Scalar slant_range(const Vec3<Scalar>& sat, const SurfacePointT<Scalar>& user) {
    return (sat - to_ecef(user)).norm();
}

/// Elevation of `sat` above the local horizontal plane at `user`, degrees.
template <typename Scalar>
Scalar elevation_angle(const SurfacePointT<Scalar>& user, const Vec3<Scalar>& sat) {
    const Vec3<Scalar> u = to_ecef(user);
    const Vec3<Scalar> up = u.normalized();
    const Vec3<Scalar> d = sat - u;
    const Scalar vertical = d.dot(up);
    const Scalar horizontal = (d - vertical * up).norm();
    return rad2deg(std::atan2(vertical, horizontal));
}

template <typename Scalar>
bool in_fov(const Vec3<Scalar>& sat, const SurfacePointT<Scalar>& point, Scalar min_elevation_deg) {
    return elevation_angle(point, sat) >= min_elevation_deg;
}

/// Off-boresight angle at the satellite between the beam-center and user rays, radians.
template <typename Scalar>
Scalar boresight_angle(const Vec3<Scalar>& sat, const SurfacePointT<Scalar>& beam_center,
                       const SurfacePointT<Scalar>& user) {
    return vector_angle(to_ecef(beam_center) - sat, to_ecef(user) - sat);
}

namespace detail {

template <typename Scalar>
Scalar vertex_angle(const Vec3<Scalar>& k, const Vec3<Scalar>& l, Scalar radius, Scalar lon_rad) {
    const Vec3<Scalar> x = orbit_point(radius, lon_rad);
    return vector_angle(k - x, l - x);
}

}  // namespace detail

inline constexpr std::size_t kOrbitAngleSamples = 2048;

/// Largest angle under which users k and l are seen from any point of the
/// equatorial orbit circle. Dense sampling, then golden-section refinement
/// inside the bracket around the best sample.
template <typename Scalar>
Scalar max_orbit_angle(const SurfacePointT<Scalar>& user_k, const SurfacePointT<Scalar>& user_l,
                       const SatelliteOrbitT<Scalar>& orbit, std::size_t samples = kOrbitAngleSamples) {
    const Vec3<Scalar> k = to_ecef(user_k);
    const Vec3<Scalar> l = to_ecef(user_l);
    const Scalar radius = orbit.radius_km();
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar step = Scalar(2) * pi / Scalar(samples);

    std::size_t best_i = 0;
    Scalar best = Scalar(-1);
    for (std::size_t i = 0; i < samples; ++i) {
        const Scalar a = detail::vertex_angle(k, l, radius, -pi + step * Scalar(i));
        if (a > best) {
            best = a;
            best_i = i;
        }
    }

    const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
    Scalar lo = -pi + step * (Scalar(best_i) - Scalar(1));
    Scalar hi = -pi + step * (Scalar(best_i) + Scalar(1));
    Scalar x1 = hi - inv_phi * (hi - lo);
    Scalar x2 = lo + inv_phi * (hi - lo);
    Scalar f1 = detail::vertex_angle(k, l, radius, x1);
    Scalar f2 = detail::vertex_angle(k, l, radius, x2);
    const Scalar tol = std::max(Scalar(1e-10), Scalar(16) * std::numeric_limits<Scalar>::epsilon() * pi);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = detail::vertex_angle(k, l, radius, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = detail::vertex_angle(k, l, radius, x1);
        }
    }
    return std::max({best, f1, f2});
}

}  // namespace meo
