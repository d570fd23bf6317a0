#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>
#include <vector>

namespace plates {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "plates-sym v1", "n nnz", then nnz lines "i j value" with i <= j.
// Optional leading '#' comment lines carry provenance.
void save_symmetric(const Eigen::SparseMatrix<double>& m, const std::string& path,
                    const std::vector<std::string>& comments = {});
Eigen::SparseMatrix<double> load_symmetric(const std::string& path);

// Binary coefficient file: 8-byte magic "PLTCOEF1", uint64 rows, uint64 cols,
// then rows*cols little-endian doubles, row after row.
void save_coefficients(const Eigen::MatrixXd& rows, const std::string& path);
Eigen::MatrixXd load_coefficients(const std::string& path);

std::string format_double(double v);

}  // namespace plates
