#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "subriem/curvature.hpp"
#include "subriem/rng.hpp"

namespace subriem::geo {

// Point of the base manifold M_k in polar/spherical coordinates about the
// reference pole. phi in [0, pi) for k = +1, [0, inf) otherwise; theta is kept
// unwrapped inside paths and only reduced mod 2pi at this boundary.
struct SurfacePoint {
    double phi = 0.0;
    double theta = 0.0;
};

// Cylindrical coordinates (phi, theta, z); z carries the swept area and its
// canonical representative lives in (-2pi, 2pi].
struct CylPoint {
    SurfacePoint surface;
    double z = 0.0;
};

// Representative of x mod 4pi in (-2pi, 2pi].
double wrap_mod_4pi(double x);

// Representative of x mod 4pi in [0, 4pi).
double wrap_to_0_4pi(double x);

// Representative of an angle in [0, 2pi).
double wrap_angle(double theta);

// Geodesic distance on M_k via the curvature law of cosines, evaluated in a
// half-angle form that is exact at coincident points.
double riemannian_distance(Curvature k, const SurfacePoint& p, const SurfacePoint& q);

struct AreaResult {
    double value = 0.0;
    bool degenerate = false;  // collinear vertices; value is 0
};

// Unsorted-vertex geodesic triangle area: spherical excess (k=1, l'Huilier),
// hyperbolic defect (k=-1, angle defect via the law of cosines), planar Heron
// (k=0). Invariant under vertex permutation. Throws std::domain_error on
// antipodal spherical vertices.
AreaResult triangle_area(Curvature k, const SurfacePoint& a, const SurfacePoint& b,
                         const SurfacePoint& c);

// Signed sector-area increment (1 - cos(sqrt(k) phi))/k * dtheta about the pole.
double swept_area_increment(Curvature k, double phi, double dtheta);

// Fiber gap zeta of x^{-1} x': z' - z + sign(theta - theta') * A(X, X', pole),
// reduced to (-2pi, 2pi].
double zeta_from_states(Curvature k, const CylPoint& x, const CylPoint& xp);

// sqrt(phi^2 + |z|), equivalent to the Carnot-Caratheodory distance from the
// identity up to two-sided constants.
double dcc_proxy(const CylPoint& p);

// Direct isometry of M_k, stored as the pose of the frame it describes:
// a rotation matrix (k=1), a unit-determinant Moebius matrix acting on the
// Poincare disk (k=-1), or a planar rigid motion (k=0). Coordinates relative
// to the frame are obtained by applying the inverse pose.
class FrameIsometry {
public:
    struct Framed {
        SurfacePoint p;
        bool at_pole = false;  // theta undefined; returned as 0 by convention
    };

    static FrameIsometry identity(Curvature k);
    // Frame rotated by alpha about the pole axis; coordinates pick up theta - alpha.
    static FrameIsometry pole_rotation(Curvature k, double alpha);
    // Frame whose pole sits at `base` (vector transported along the connecting
    // geodesic).
    static FrameIsometry translation_to(Curvature k, const SurfacePoint& base);
    static FrameIsometry random(Curvature k, Rng& rng);

    FrameIsometry inverse() const;
    FrameIsometry compose(const FrameIsometry& other) const;  // this after other

    Framed apply(const SurfacePoint& p) const;

    Curvature curvature() const { return k_; }

private:
    explicit FrameIsometry(Curvature k) : k_(k) {}

    Curvature k_;
    Eigen::Matrix3d rot_ = Eigen::Matrix3d::Identity();  // k = +1
    std::complex<double> moeb_a_{1.0, 0.0};              // k = -1, |a|^2-|b|^2=1
    std::complex<double> moeb_b_{0.0, 0.0};
    double plane_angle_ = 0.0;                           // k = 0
    Eigen::Vector2d plane_shift_ = Eigen::Vector2d::Zero();
};

// Coordinates of p relative to the frame.
FrameIsometry::Framed to_frame(Curvature k, const FrameIsometry& frame, const SurfacePoint& p);

// Embeddings used by the exact polyline area functionals.
Eigen::Vector3d embed_sphere(const SurfacePoint& p);       // unit vector
Eigen::Vector3d embed_hyperboloid(const SurfacePoint& p);  // <x,x>_L = -1 sheet
Eigen::Vector2d embed_plane(const SurfacePoint& p);

// Signed area of the geodesic triangle (pole, u, v) for consecutive polyline
// vertices; the sign follows the orientation of increasing theta.
double signed_pole_triangle(Curvature k, const SurfacePoint& u, const SurfacePoint& v);

// Exact signed swept area of the polyline relative to the coordinate pole of
// `frame` (identity frame when omitted): the sum of pole-fan triangles.
double swept_area_path(Curvature k, const Eigen::ArrayXd& phi, const Eigen::ArrayXd& theta,
                       const FrameIsometry* frame = nullptr);

// n+1 points of the geodesic from p to q (inclusive).
std::vector<SurfacePoint> geodesic_points(Curvature k, const SurfacePoint& p,
                                          const SurfacePoint& q, int n);

}  // namespace subriem::geo
