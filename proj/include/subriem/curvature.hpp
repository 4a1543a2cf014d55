#pragma once

#include <cmath>
#include <stdexcept>

namespace subriem {

// Model space selector: constant curvature k of the base manifold.
// k = +1 sphere, k = -1 hyperbolic plane, k = 0 Euclidean plane (Heisenberg).
enum class Curvature : int { Hyperbolic = -1, Flat = 0, Spherical = 1 };

inline Curvature curvature_from_int(int k) {
    switch (k) {
        case -1: return Curvature::Hyperbolic;
        case 0: return Curvature::Flat;
        case 1: return Curvature::Spherical;
        default: throw std::invalid_argument("curvature must be -1, 0 or +1");
    }
}

inline int curvature_to_int(Curvature k) { return static_cast<int>(k); }

// Generalized trigonometry. Every coefficient of the cylindrical SDE system is
// an even function of sqrt(k)*phi, so the k = -1 branch is the hyperbolic
// continuation and k = 0 the common limit.

// sqrt(k) * cot(sqrt(k) phi); 1/phi at k = 0.
template <class S>
S cot_k(Curvature k, S phi) {
    switch (k) {
        case Curvature::Spherical: return std::cos(phi) / std::sin(phi);
        case Curvature::Hyperbolic: return std::cosh(phi) / std::sinh(phi);
        default: return S(1) / phi;
    }
}

// sqrt(k) / sin(sqrt(k) phi); 1/phi at k = 0. Diffusion coefficient of theta.
template <class S>
S theta_coeff_k(Curvature k, S phi) {
    switch (k) {
        case Curvature::Spherical: return S(1) / std::sin(phi);
        case Curvature::Hyperbolic: return S(1) / std::sinh(phi);
        default: return S(1) / phi;
    }
}

// tan(sqrt(k) phi / 2) / sqrt(k); phi/2 at k = 0. Diffusion coefficient of z.
template <class S>
S z_coeff_k(Curvature k, S phi) {
    switch (k) {
        case Curvature::Spherical: return std::tan(phi / S(2));
        case Curvature::Hyperbolic: return std::tanh(phi / S(2));
        default: return phi / S(2);
    }
}

// (1 - cos(sqrt(k) phi)) / k; phi^2/2 at k = 0. Density of the sector-area
// form dA = sector_density(phi) dtheta.
template <class S>
S sector_density_k(Curvature k, S phi) {
    switch (k) {
        case Curvature::Spherical: return S(1) - std::cos(phi);
        case Curvature::Hyperbolic: return std::cosh(phi) - S(1);
        default: return phi * phi / S(2);
    }
}

// k / sin^2(sqrt(k) phi); 1/phi^2 at k = 0. Density of the clock
// sigma(t) = int_0^t k/sin^2(sqrt(k) phi_s) ds.
template <class S>
S sigma_density_k(Curvature k, S phi) {
    const S c = theta_coeff_k(k, phi);
    return c * c;
}

// 1 / (1 + cos(sqrt(k) phi)); 1/2 at k = 0. Integrand of the K(t) functional.
template <class S>
S k_integrand_k(Curvature k, S phi) {
    switch (k) {
        case Curvature::Spherical: return S(1) / (S(1) + std::cos(phi));
        case Curvature::Hyperbolic: return S(1) / (S(1) + std::cosh(phi));
        default: return S(1) / S(2);
    }
}

// cos(sqrt(k) phi) with the hyperbolic continuation; 1 at k = 0.
template <class S>
S cos_k(Curvature k, S phi) {
    switch (k) {
        case Curvature::Spherical: return std::cos(phi);
        case Curvature::Hyperbolic: return std::cosh(phi);
        default: return S(1);
    }
}

// sin(sqrt(k) phi)/sqrt(k) with the hyperbolic continuation; phi at k = 0.
template <class S>
S sin_k(Curvature k, S phi) {
    switch (k) {
        case Curvature::Spherical: return std::sin(phi);
        case Curvature::Hyperbolic: return std::sinh(phi);
        default: return phi;
    }
}

}  // namespace subriem
