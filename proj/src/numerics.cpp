#include "cfaging/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <sstream>

namespace cfaging {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream_id)
{
    return std::seed_seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
        0x9e3779b9u};
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id)
{
    auto seq = make_seed_seq(seed, stream_id);
    engine_.seed(seq);
}

CVector sample_complex_gaussian(RngStream& rng, Eigen::Index n)
{
    if (n < 1) {
        throw std::invalid_argument("sample_complex_gaussian: n must be positive");
    }
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = rng.complex_normal();
    }
    return v;
}

void fill_complex_gaussian(RngStream& rng, Eigen::Ref<CMatrix> out)
{
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            out(i, j) = rng.complex_normal();
        }
    }
}

HermitianSolver::HermitianSolver(const CMatrix& a)
{
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("HermitianSolver: matrix must be square");
    }
    llt_.compute(a);
    if (llt_.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(a, Eigen::EigenvaluesOnly);
        std::ostringstream msg;
        msg << "solve_hermitian: matrix is not positive definite (smallest eigenvalue "
            << eig.eigenvalues().minCoeff() << ")";
        throw NumericalError(msg.str());
    }
}

CVector solve_hermitian(const CMatrix& a, const CVector& b)
{
    if (a.rows() != b.size()) {
        throw std::invalid_argument("solve_hermitian: dimension mismatch");
    }
    return HermitianSolver(a).solve(b);
}

RVector solve_general(const RMatrix& a, const RVector& b)
{
    if (a.rows() != a.cols() || a.rows() != b.size()) {
        throw std::invalid_argument("solve_general: dimension mismatch");
    }
    if (a.rows() == 0) {
        return RVector(0);
    }
    Eigen::PartialPivLU<RMatrix> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e3 * std::numeric_limits<double>::epsilon())) {
        std::ostringstream msg;
        msg << "solve_general: matrix is numerically singular (rcond " << rcond << ")";
        throw NumericalError(msg.str());
    }
    return lu.solve(b);
}

}  // namespace cfaging
