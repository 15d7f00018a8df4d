// SPDX-License-Identifier: Apache-2.0
#include "mdmsim/matrix_io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mdmsim {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

MatrixSetWriter::MatrixSetWriter(const std::string& path, const std::string& kind) : out_(path) {
    if (!out_) throw std::runtime_error("matrix_io: cannot open for writing: " + path);
    out_ << "mdmsim-matrix-set 1\n";
    out_ << "kind " << kind << "\n";
}

void MatrixSetWriter::scalar(const std::string& name, double value) {
    out_ << "scalar " << name << " " << fmt(value) << "\n";
}

void MatrixSetWriter::int_vector(const std::string& name, const std::vector<int>& v) {
    out_ << "ivec " << name << " " << v.size();
    for (int x : v) out_ << " " << x;
    out_ << "\n";
}

void MatrixSetWriter::real_vector(const std::string& name, const std::vector<double>& v) {
    out_ << "rvec " << name << " " << v.size();
    for (double x : v) out_ << " " << fmt(x);
    out_ << "\n";
}

void MatrixSetWriter::matrix(const std::string& name, const Eigen::MatrixXcd& m) {
    out_ << "matrix " << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out_ << " ";
            out_ << fmt(m(r, c).real()) << " " << fmt(m(r, c).imag());
        }
        out_ << "\n";
    }
}

void MatrixSetWriter::finish() {
    if (finished_) return;
    out_ << "end\n";
    out_.flush();
    if (!out_) throw std::runtime_error("matrix_io: write failed");
    finished_ = true;
}

MatrixSetReader::MatrixSetReader(const std::string& path, const std::string& expected_kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("matrix_io: cannot open for reading: " + path);
    std::string word;
    int version = 0;
    in >> word >> version;
    if (word != "mdmsim-matrix-set" || version != 1)
        throw std::runtime_error("matrix_io: unrecognized header in " + path);
    std::string kind_tag, kind;
    in >> kind_tag >> kind;
    if (kind_tag != "kind" || kind != expected_kind)
        throw std::runtime_error("matrix_io: expected kind '" + expected_kind + "', got '" + kind + "'");

    while (in >> word) {
        if (word == "end") return;
        std::string name;
        if (word == "scalar") {
            double v = 0.0;
            in >> name >> v;
            scalars_[name] = v;
        } else if (word == "ivec" || word == "rvec") {
            std::size_t n = 0;
            in >> name >> n;
            std::vector<double> v(n);
            for (double& x : v) in >> x;
            vectors_[name] = std::move(v);
        } else if (word == "matrix") {
            Eigen::Index rows = 0, cols = 0;
            in >> name >> rows >> cols;
            Eigen::MatrixXcd m(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) {
                    double re = 0.0, im = 0.0;
                    in >> re >> im;
                    m(r, c) = {re, im};
                }
            matrices_[name] = std::move(m);
        } else {
            throw std::runtime_error("matrix_io: unknown record '" + word + "' in " + path);
        }
        if (!in) throw std::runtime_error("matrix_io: truncated record in " + path);
    }
    throw std::runtime_error("matrix_io: missing end marker in " + path);
}

double MatrixSetReader::scalar(const std::string& name) const {
    const auto it = scalars_.find(name);
    if (it == scalars_.end()) throw std::runtime_error("matrix_io: missing scalar " + name);
    return it->second;
}

std::vector<int> MatrixSetReader::int_vector(const std::string& name) const {
    const auto it = vectors_.find(name);
    if (it == vectors_.end()) throw std::runtime_error("matrix_io: missing vector " + name);
    std::vector<int> out(it->second.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(it->second[i]);
    return out;
}

std::vector<double> MatrixSetReader::real_vector(const std::string& name) const {
    const auto it = vectors_.find(name);
    if (it == vectors_.end()) throw std::runtime_error("matrix_io: missing vector " + name);
    return it->second;
}

Eigen::MatrixXcd MatrixSetReader::matrix(const std::string& name) const {
    const auto it = matrices_.find(name);
    if (it == matrices_.end()) throw std::runtime_error("matrix_io: missing matrix " + name);
    return it->second;
}

bool MatrixSetReader::has_matrix(const std::string& name) const {
    return matrices_.count(name) != 0;
}

} // namespace mdmsim
