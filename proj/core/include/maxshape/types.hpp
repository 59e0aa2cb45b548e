#pragma once

#include <Eigen/Dense>
#include <complex>

namespace maxshape {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using CVecX = Eigen::VectorXcd;
using MatX = Eigen::MatrixXd;
using CMatX = Eigen::MatrixXcd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

// Number of real spherical harmonics of degree <= L, and the flat index of (n, m).
inline int sh_count(int L) { return (L + 1) * (L + 1); }
inline int sh_index(int n, int m) { return n * n + n + m; }

// bilinear (unconjugated) dot products
inline cplx dotu(const CVec3& a, const CVec3& b) { return a.cwiseProduct(b).sum(); }
inline cplx dotu(const CVec3& a, const Vec3& b) { return a.cwiseProduct(b.cast<cplx>()).sum(); }

// Eigen's cross() conjugates for complex scalars; this one does not.
template <class A, class B>
inline CVec3 crossu(const A& a, const B& b)
{
    const CVec3 x = a.template cast<cplx>(), y = b.template cast<cplx>();
    return CVec3(x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]);
}

// real matrix times complex matrix without promoting the real operand
inline CMatX rmul(const MatX& A, const CMatX& B)
{
    CMatX out(A.rows(), B.cols());
    out.real() = A * B.real();
    out.imag() = A * B.imag();
    return out;
}

inline CVecX rmul(const MatX& A, const CVecX& b)
{
    CVecX out(A.rows());
    out.real() = A * b.real();
    out.imag() = A * b.imag();
    return out;
}

}  // namespace maxshape
