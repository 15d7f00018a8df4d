// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "mdmsim/rng.hpp"

namespace mdmsim {

/// Haar-distributed random unitary via QR of a complex Ginibre matrix with the
/// R diagonal phase fix (makes the distribution exact and the draw unique).
Eigen::MatrixXcd haar_unitary(int dim, Rng& rng);

/// Eigenvalues of a Hermitian matrix, ascending.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& h);

} // namespace mdmsim
