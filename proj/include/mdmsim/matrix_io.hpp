// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace mdmsim {

/// Structured-text container for named matrices and vectors. Matrices are
/// written row-major as "re im" pairs with full double precision, so a
/// save/load round trip is exact. Layout:
///
///   mdmsim-matrix-set 1
///   kind <tag>
///   scalar <name> <value>
///   ivec <name> <n> <v0> ... | rvec <name> <n> <v0> ...
///   matrix <name> <rows> <cols>
///   <re> <im> ... (cols pairs per row line)
///   end
class MatrixSetWriter {
  public:
    MatrixSetWriter(const std::string& path, const std::string& kind);
    void scalar(const std::string& name, double value);
    void int_vector(const std::string& name, const std::vector<int>& v);
    void real_vector(const std::string& name, const std::vector<double>& v);
    void matrix(const std::string& name, const Eigen::MatrixXcd& m);
    void finish();

  private:
    std::ofstream out_;
    bool finished_ = false;
};

class MatrixSetReader {
  public:
    MatrixSetReader(const std::string& path, const std::string& expected_kind);
    double scalar(const std::string& name) const;
    std::vector<int> int_vector(const std::string& name) const;
    std::vector<double> real_vector(const std::string& name) const;
    Eigen::MatrixXcd matrix(const std::string& name) const;
    bool has_matrix(const std::string& name) const;

  private:
    std::map<std::string, double> scalars_;
    std::map<std::string, std::vector<double>> vectors_;
    std::map<std::string, Eigen::MatrixXcd> matrices_;
};

} // namespace mdmsim
