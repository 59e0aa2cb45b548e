#pragma once

#include "maxshape/solver.hpp"

#include <vector>

namespace maxshape {

// Scattering coefficients of a homogeneous sphere, orders 1..N.
struct MieCoefficients {
    std::vector<cplx> a, b;
    int nterms() const { return static_cast<int>(a.size()); }
};

// nterms <= 0 selects ceil(kappa_e a) + 15.
MieCoefficients mie_coefficients(double radius, const Material& mat, int nterms = 0);

// Far field of a plane wave scattered by the sphere of given radius centred
// at the origin, with the normalisation E_s ~ exp(i k r)/(4 pi r) E_inf.
CMatX mie_far_field(double radius, const Material& mat, const PlaneWave& wave, const MatX& directions,
                    int nterms = 0);

// d/da of the far field: central differences with one Richardson step.
CMatX mie_radius_derivative(double radius, const Material& mat, const PlaneWave& wave,
                            const MatX& directions, double h = 1e-3, int nterms = 0);

}  // namespace maxshape
