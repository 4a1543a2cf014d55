#include "subriem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subriem::geo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kFourPi = 4.0 * kPi;
constexpr double kPoleTol = 1e-14;

double clamp1(double x) { return std::min(1.0, std::max(-1.0, x)); }

}  // namespace

double wrap_mod_4pi(double x) {
    double y = std::fmod(x, kFourPi);
    if (y <= -kTwoPi) y += kFourPi;
    if (y > kTwoPi) y -= kFourPi;
    return y;
}

double wrap_to_0_4pi(double x) {
    double y = std::fmod(x, kFourPi);
    if (y < 0.0) y += kFourPi;
    if (y >= kFourPi) y -= kFourPi;
    return y;
}

double wrap_angle(double theta) {
    double y = std::fmod(theta, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    return y;
}

double riemannian_distance(Curvature k, const SurfacePoint& p, const SurfacePoint& q) {
    // Half-angle (haversine-type) form, valid for all three curvatures:
    //   sin_k(rho/2)^2 = sin_k((phi-phi')/2)^2 + sin_k(phi) sin_k(phi') sin((dtheta)/2)^2
    const double dphi_half = sin_k(k, 0.5 * (p.phi - q.phi));
    const double dth_half = std::sin(0.5 * (p.theta - q.theta));
    const double s2 = dphi_half * dphi_half + sin_k(k, p.phi) * sin_k(k, q.phi) * dth_half * dth_half;
    const double s = std::sqrt(std::max(0.0, s2));
    switch (k) {
        case Curvature::Spherical: return 2.0 * std::asin(clamp1(s));
        case Curvature::Hyperbolic: return 2.0 * std::asinh(s);
        default: return 2.0 * s;
    }
}

double swept_area_increment(Curvature k, double phi, double dtheta) {
    return sector_density_k(k, phi) * dtheta;
}

namespace {

AreaResult area_from_sides(Curvature k, double a, double b, double c) {
    // Sort so the result is bit-identical under vertex permutation.
    double s[3] = {a, b, c};
    std::sort(s, s + 3);
    a = s[2];
    b = s[1];
    c = s[0];

    const double degeneracy = a - b - c;  // 0 when collinear, < 0 for proper triangles
    if (c <= 1e-15 || degeneracy >= -1e-14 * std::max(1.0, a)) {
        return {0.0, true};
    }

    switch (k) {
        case Curvature::Spherical: {
            // l'Huilier, stable for thin triangles
            const double sp = 0.5 * (a + b + c);
            const double t = std::tan(0.5 * sp) * std::tan(0.5 * (sp - a)) *
                             std::tan(0.5 * (sp - b)) * std::tan(0.5 * (sp - c));
            return {4.0 * std::atan(std::sqrt(std::max(0.0, t))), false};
        }
        case Curvature::Hyperbolic: {
            // angle defect with angles from the hyperbolic law of cosines
            const auto angle = [](double opp, double s1, double s2) {
                const double ca =
                    (std::cosh(s1) * std::cosh(s2) - std::cosh(opp)) / (std::sinh(s1) * std::sinh(s2));
                return std::acos(clamp1(ca));
            };
            const double defect = kPi - angle(a, b, c) - angle(b, a, c) - angle(c, a, b);
            return {std::max(0.0, defect), false};
        }
        default: {
            // Kahan's ordering-stable Heron; a >= b >= c already holds
            const double t = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
            return {0.25 * std::sqrt(std::max(0.0, t)), false};
        }
    }
}

}  // namespace

AreaResult triangle_area(Curvature k, const SurfacePoint& a, const SurfacePoint& b,
                         const SurfacePoint& c) {
    const double ab = riemannian_distance(k, a, b);
    const double bc = riemannian_distance(k, b, c);
    const double ca = riemannian_distance(k, c, a);
    if (k == Curvature::Spherical) {
        const double antipode = kPi - 1e-9;
        if (ab > antipode || bc > antipode || ca > antipode) {
            throw std::domain_error("triangle_area: antipodal spherical vertices");
        }
    }
    return area_from_sides(k, bc, ca, ab);
}

double zeta_from_states(Curvature k, const CylPoint& x, const CylPoint& xp) {
    const double rho = riemannian_distance(k, x.surface, xp.surface);
    double area = 0.0;
    if (rho > 1e-15) {
        const SurfacePoint pole{0.0, 0.0};
        area = triangle_area(k, x.surface, xp.surface, pole).value;
    }
    const double sign = (x.surface.theta > xp.surface.theta)   ? 1.0
                        : (x.surface.theta < xp.surface.theta) ? -1.0
                                                               : 0.0;
    return wrap_mod_4pi(xp.z - x.z + sign * area);
}

double dcc_proxy(const CylPoint& p) {
    return std::sqrt(p.surface.phi * p.surface.phi + std::abs(wrap_mod_4pi(p.z)));
}

// ---------------------------------------------------------------------------
// embeddings and exact polyline areas

Eigen::Vector3d embed_sphere(const SurfacePoint& p) {
    const double sp = std::sin(p.phi);
    return {sp * std::cos(p.theta), sp * std::sin(p.theta), std::cos(p.phi)};
}

Eigen::Vector3d embed_hyperboloid(const SurfacePoint& p) {
    const double sp = std::sinh(p.phi);
    return {sp * std::cos(p.theta), sp * std::sin(p.theta), std::cosh(p.phi)};
}

Eigen::Vector2d embed_plane(const SurfacePoint& p) {
    return {p.phi * std::cos(p.theta), p.phi * std::sin(p.theta)};
}

double signed_pole_triangle(Curvature k, const SurfacePoint& u, const SurfacePoint& v) {
    switch (k) {
        case Curvature::Spherical: {
            // signed excess of (N0, u, v): 2 atan2(det, 1 + sum of cosines)
            const Eigen::Vector3d a = embed_sphere(u);
            const Eigen::Vector3d b = embed_sphere(v);
            const double det = a.x() * b.y() - a.y() * b.x();  // N0 . (a x b)
            const double den = 1.0 + a.z() + b.z() + a.dot(b);
            return 2.0 * std::atan2(det, den);
        }
        case Curvature::Hyperbolic: {
            // hyperbolic analog with the Lorentz Gram terms
            const Eigen::Vector3d a = embed_hyperboloid(u);
            const Eigen::Vector3d b = embed_hyperboloid(v);
            const double det = a.x() * b.y() - a.y() * b.x();
            const double lorentz_ab = a.x() * b.x() + a.y() * b.y() - a.z() * b.z();
            const double den = 1.0 + a.z() + b.z() - lorentz_ab;
            return 2.0 * std::atan2(det, den);
        }
        default: {
            const Eigen::Vector2d a = embed_plane(u);
            const Eigen::Vector2d b = embed_plane(v);
            return 0.5 * (a.x() * b.y() - a.y() * b.x());
        }
    }
}

double swept_area_path(Curvature k, const Eigen::ArrayXd& phi, const Eigen::ArrayXd& theta,
                       const FrameIsometry* frame) {
    if (phi.size() != theta.size() || phi.size() < 2) {
        throw std::invalid_argument("swept_area_path: mismatched or empty path");
    }
    double total = 0.0;
    SurfacePoint prev{phi[0], theta[0]};
    if (frame) prev = frame->apply(prev).p;
    for (Eigen::Index i = 1; i < phi.size(); ++i) {
        SurfacePoint cur{phi[i], theta[i]};
        if (frame) cur = frame->apply(cur).p;
        total += signed_pole_triangle(k, prev, cur);
        prev = cur;
    }
    return total;
}

// ---------------------------------------------------------------------------
// frames

FrameIsometry FrameIsometry::identity(Curvature k) { return FrameIsometry(k); }

FrameIsometry FrameIsometry::pole_rotation(Curvature k, double alpha) {
    FrameIsometry f(k);
    switch (k) {
        case Curvature::Spherical:
            f.rot_ = Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitZ()).toRotationMatrix();
            break;
        case Curvature::Hyperbolic:
            f.moeb_a_ = std::polar(1.0, 0.5 * alpha);
            f.moeb_b_ = 0.0;
            break;
        default:
            f.plane_angle_ = alpha;
            break;
    }
    return f;
}

FrameIsometry FrameIsometry::translation_to(Curvature k, const SurfacePoint& base) {
    FrameIsometry f(k);
    switch (k) {
        case Curvature::Spherical: {
            // rotate the pole to `base` about the axis orthogonal to both
            const Eigen::Vector3d target = embed_sphere(base);
            const Eigen::Vector3d pole = Eigen::Vector3d::UnitZ();
            f.rot_ = Eigen::Quaterniond::FromTwoVectors(pole, target).toRotationMatrix();
            break;
        }
        case Curvature::Hyperbolic: {
            // Moebius map 0 -> w in the disk: z -> (z + w)/(1 + conj(w) z)
            const double r = std::tanh(0.5 * base.phi);
            const std::complex<double> w = std::polar(r, base.theta);
            const double scale = 1.0 / std::sqrt(std::max(1e-300, 1.0 - std::norm(w)));
            f.moeb_a_ = scale;
            f.moeb_b_ = scale * w;
            break;
        }
        default:
            f.plane_shift_ = embed_plane(base);
            break;
    }
    return f;
}

FrameIsometry FrameIsometry::random(Curvature k, Rng& rng) {
    switch (k) {
        case Curvature::Spherical: {
            FrameIsometry f(k);
            Eigen::Quaterniond q(rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian());
            q.normalize();
            f.rot_ = q.toRotationMatrix();
            return f;
        }
        case Curvature::Hyperbolic: {
            const SurfacePoint base{rng.uniform(0.0, 2.0), rng.uniform(0.0, kTwoPi)};
            return pole_rotation(k, rng.uniform(0.0, kTwoPi))
                .compose(translation_to(k, base));
        }
        default: {
            FrameIsometry f(k);
            f.plane_angle_ = rng.uniform(0.0, kTwoPi);
            f.plane_shift_ = Eigen::Vector2d(rng.gaussian(), rng.gaussian());
            return f;
        }
    }
}

FrameIsometry FrameIsometry::inverse() const {
    FrameIsometry f(k_);
    switch (k_) {
        case Curvature::Spherical:
            f.rot_ = rot_.transpose();
            break;
        case Curvature::Hyperbolic:
            f.moeb_a_ = std::conj(moeb_a_);
            f.moeb_b_ = -moeb_b_;
            break;
        default: {
            f.plane_angle_ = -plane_angle_;
            const double c = std::cos(plane_angle_), s = std::sin(plane_angle_);
            f.plane_shift_ = -Eigen::Vector2d(c * plane_shift_.x() + s * plane_shift_.y(),
                                              -s * plane_shift_.x() + c * plane_shift_.y());
            break;
        }
    }
    return f;
}

FrameIsometry FrameIsometry::compose(const FrameIsometry& other) const {
    if (other.k_ != k_) throw std::invalid_argument("compose: curvature mismatch");
    FrameIsometry f(k_);
    switch (k_) {
        case Curvature::Spherical:
            f.rot_ = rot_ * other.rot_;
            break;
        case Curvature::Hyperbolic:
            // product of [[a, b], [conj b, conj a]] matrices keeps the form
            f.moeb_a_ = moeb_a_ * other.moeb_a_ + moeb_b_ * std::conj(other.moeb_b_);
            f.moeb_b_ = moeb_a_ * other.moeb_b_ + moeb_b_ * std::conj(other.moeb_a_);
            break;
        default: {
            const double c = std::cos(plane_angle_), s = std::sin(plane_angle_);
            f.plane_angle_ = plane_angle_ + other.plane_angle_;
            f.plane_shift_ =
                Eigen::Vector2d(c * other.plane_shift_.x() - s * other.plane_shift_.y(),
                                s * other.plane_shift_.x() + c * other.plane_shift_.y()) +
                plane_shift_;
            break;
        }
    }
    return f;
}

FrameIsometry::Framed FrameIsometry::apply(const SurfacePoint& p) const {
    switch (k_) {
        case Curvature::Spherical: {
            const Eigen::Vector3d v = rot_.transpose() * embed_sphere(p);
            const double rxy = std::hypot(v.x(), v.y());
            if (rxy < kPoleTol) {
                return {{v.z() > 0.0 ? 0.0 : kPi, 0.0}, true};
            }
            return {{std::atan2(rxy, v.z()), wrap_angle(std::atan2(v.y(), v.x()))}, false};
        }
        case Curvature::Hyperbolic: {
            const std::complex<double> z = std::polar(std::tanh(0.5 * p.phi), p.theta);
            const std::complex<double> w =
                (std::conj(moeb_a_) * z - moeb_b_) / (-std::conj(moeb_b_) * z + moeb_a_);
            const double r = std::abs(w);
            if (r < kPoleTol) return {{0.0, 0.0}, true};
            return {{2.0 * std::atanh(std::min(r, 1.0 - 1e-16)), wrap_angle(std::arg(w))}, false};
        }
        default: {
            const Eigen::Vector2d d = embed_plane(p) - plane_shift_;
            const double c = std::cos(plane_angle_), s = std::sin(plane_angle_);
            const Eigen::Vector2d v(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
            const double r = v.norm();
            if (r < kPoleTol) return {{0.0, 0.0}, true};
            return {{r, wrap_angle(std::atan2(v.y(), v.x()))}, false};
        }
    }
}

FrameIsometry::Framed to_frame(Curvature k, const FrameIsometry& frame, const SurfacePoint& p) {
    if (frame.curvature() != k) throw std::invalid_argument("to_frame: curvature mismatch");
    return frame.apply(p);
}

std::vector<SurfacePoint> geodesic_points(Curvature k, const SurfacePoint& p,
                                          const SurfacePoint& q, int n) {
    if (n < 1) throw std::invalid_argument("geodesic_points: n >= 1 required");
    std::vector<SurfacePoint> out;
    out.reserve(n + 1);
    const double d = riemannian_distance(k, p, q);
    for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        SurfacePoint pt;
        switch (k) {
            case Curvature::Spherical: {
                const Eigen::Vector3d u = embed_sphere(p), v = embed_sphere(q);
                const double sd = std::sin(d);
                const Eigen::Vector3d w =
                    sd < 1e-14 ? u
                               : Eigen::Vector3d((std::sin((1.0 - t) * d) * u + std::sin(t * d) * v) / sd);
                const double rxy = std::hypot(w.x(), w.y());
                pt = {std::atan2(rxy, w.z()), rxy < kPoleTol ? 0.0 : std::atan2(w.y(), w.x())};
                break;
            }
            case Curvature::Hyperbolic: {
                const Eigen::Vector3d u = embed_hyperboloid(p), v = embed_hyperboloid(q);
                const double sd = std::sinh(d);
                const Eigen::Vector3d w =
                    sd < 1e-14 ? u
                               : Eigen::Vector3d((std::sinh((1.0 - t) * d) * u + std::sinh(t * d) * v) / sd);
                const double rxy = std::hypot(w.x(), w.y());
                pt = {std::asinh(rxy), rxy < kPoleTol ? 0.0 : std::atan2(w.y(), w.x())};
                break;
            }
            default: {
                const Eigen::Vector2d w = (1.0 - t) * embed_plane(p) + t * embed_plane(q);
                pt = {w.norm(), w.norm() < kPoleTol ? 0.0 : std::atan2(w.y(), w.x())};
                break;
            }
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace subriem::geo
