#pragma once

// Dense reference for the finite spectrum of K c = mu rho I c when I is
// only semidefinite.  The kernel of I is the span of the constant-field
// coefficient vectors, built here from the mesh geometry; it is removed by
// an orthogonal change of basis and a Schur complement, and the remaining
// definite pencil goes to LAPACK.

#include "plates/mesh.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <stdexcept>

namespace oracle {

// column k: circulations of e_k on every edge, then minus its flux through
// every face (faces oriented by their ascending vertex order)
inline Eigen::MatrixXd constant_kernel(const plates::SimplicialComplex3& k)
{
    const int ne = k.num_edges(), nf = k.num_faces();
    Eigen::MatrixXd n(ne + nf, 3);
    for (int e = 0; e < ne; ++e)
        n.row(e) = (k.vertex(k.edge(e)[1]) - k.vertex(k.edge(e)[0])).transpose();
    for (int f = 0; f < nf; ++f) {
        const auto& v = k.face(f);
        const plates::Vec3 a = 0.5 * (k.vertex(v[1]) - k.vertex(v[0])).cross(k.vertex(v[2]) - k.vertex(v[0]));
        n.row(ne + f) = -a.transpose();
    }
    return n;
}

// finite eigenvalues, ascending; `kernel` spans the null space of I
inline Eigen::VectorXd dense_pencil_eigenvalues(const Eigen::MatrixXd& kmat, const Eigen::MatrixXd& imat, double rho,
                                                const Eigen::MatrixXd& kernel)
{
    const Eigen::Index n = kmat.rows(), r = kernel.cols();
    const Eigen::VectorXd d = imat.diagonal().cwiseSqrt().cwiseInverse();
    // scaled coordinates c = D y; the kernel becomes D^-1 N
    Eigen::MatrixXd nk = d.cwiseInverse().asDiagonal() * kernel;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(nk);
    const auto h = qr.householderQ();

    Eigen::MatrixXd b = d.asDiagonal() * kmat * d.asDiagonal();
    b.applyOnTheLeft(h.transpose());
    b.applyOnTheRight(h);
    Eigen::MatrixXd c = d.asDiagonal() * imat * d.asDiagonal();
    c.applyOnTheLeft(h.transpose());
    c.applyOnTheRight(h);

    const Eigen::Index m = n - r;
    Eigen::MatrixXd s = b.bottomRightCorner(m, m);
    const Eigen::MatrixXd b11 = b.topLeftCorner(r, r);
    const Eigen::MatrixXd b12 = b.topRightCorner(r, m);
    s.noalias() -= b12.transpose() * b11.fullPivLu().solve(b12);
    b.resize(0, 0);
    Eigen::MatrixXd mr = rho * c.bottomRightCorner(m, m);
    c.resize(0, 0);
    s = 0.5 * (s + s.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();

    Eigen::VectorXd w(m);
    const lapack_int info = LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, 'N', 'U', static_cast<lapack_int>(m), s.data(),
                                           static_cast<lapack_int>(m), mr.data(), static_cast<lapack_int>(m),
                                           w.data());
    if (info != 0)
        throw std::runtime_error("dsygvd failed with info " + std::to_string(info));
    return w;
}

// the `count` entries of an ascending spectrum closest to sigma, ascending
inline Eigen::VectorXd nearest(const Eigen::VectorXd& spectrum, double sigma, int count)
{
    std::vector<double> v(spectrum.data(), spectrum.data() + spectrum.size());
    std::stable_sort(v.begin(), v.end(),
                     [&](double a, double b) { return std::abs(a - sigma) < std::abs(b - sigma); });
    v.resize(std::min<std::size_t>(v.size(), static_cast<std::size_t>(count)));
    std::sort(v.begin(), v.end());
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace oracle
