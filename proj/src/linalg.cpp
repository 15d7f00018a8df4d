// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/linalg.hpp"

#include <stdexcept>

namespace mdmsim {

Eigen::MatrixXcd haar_unitary(int dim, Rng& rng) {
    if (dim < 1) throw std::invalid_argument("haar_unitary: dim must be >= 1");
    Eigen::MatrixXcd g(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) g(i, j) = rng.cnormal();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const cplx d = r(j, j);
        const double a = std::abs(d);
        const cplx phase = (a > 0.0) ? d / a : cplx(1.0, 0.0);
        q.col(j) *= phase;
    }
    return q;
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
    const auto& ev = es.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

} // namespace mdmsim
