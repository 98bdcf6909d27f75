#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace cfaging {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zeroth-order Bessel function of the first kind.
/// Throws std::domain_error for non-finite input.
template <typename Scalar>
Scalar bessel_j0(Scalar x)
{
    if (!std::isfinite(x)) {
        throw std::domain_error("bessel_j0: non-finite argument");
    }
    // even in x
    return static_cast<Scalar>(std::cyl_bessel_j(0.0, std::abs(static_cast<double>(x))));
}

/// Reproducible random stream addressed by (seed, stream_id).
///
/// Two streams with the same pair produce the same sequence regardless of
/// which thread draws from them. Streams with different ids are seeded
/// through std::seed_seq, which decorrelates the engine states.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    double uniform() { return uniform_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
    double normal() { return normal_(engine_); }

    /// One CN(0, 1) draw: real and imaginary parts each N(0, 1/2).
    Complex complex_normal()
    {
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {re * M_SQRT1_2, im * M_SQRT1_2};
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// i.i.d. CN(0, I_n) vector.
CVector sample_complex_gaussian(RngStream& rng, Eigen::Index n);

/// Fill an existing matrix with i.i.d. CN(0, 1) entries, column-major order.
void fill_complex_gaussian(RngStream& rng, Eigen::Ref<CMatrix> out);

/// Factor-once, solve-many wrapper around a Hermitian positive definite matrix.
class HermitianSolver {
public:
    explicit HermitianSolver(const CMatrix& a);

    Eigen::Index dimension() const { return llt_.rows(); }

    template <typename Rhs>
    CMatrix solve(const Eigen::MatrixBase<Rhs>& b) const
    {
        if (b.rows() != llt_.rows()) {
            throw std::invalid_argument("HermitianSolver: dimension mismatch");
        }
        return llt_.solve(b);
    }

private:
    Eigen::LLT<CMatrix> llt_;
};

/// Solves A x = b for Hermitian positive definite A.
/// Throws NumericalError naming the smallest eigenvalue if A is not PD.
CVector solve_hermitian(const CMatrix& a, const CVector& b);

/// Solves A x = b for a general square real matrix via LU with partial
/// pivoting. Throws NumericalError if A is numerically singular.
RVector solve_general(const RMatrix& a, const RVector& b);

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// sqrt(1 - x^2), clamped at zero for |x| slightly above one.
template <typename Scalar>
Scalar complement(Scalar x)
{
    const Scalar v = Scalar(1) - x * x;
    return v > Scalar(0) ? std::sqrt(v) : Scalar(0);
}

}  // namespace cfaging
