#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddibp/likelihood.hpp"

namespace ddibp {

// Dialect: comma separator, '.' decimal point, tokens `inf` and `nan`.
// Matrices carry no header row; tables do.

// Any finite/inf numeric matrix (e.g. distances). `inf` tokens allowed.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Data table: empty cells or `nan` mark missing entries.
DataMatrix read_data_csv(const std::string& path);

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXi& m);

// Header + rows of doubles.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

std::string format_double(double v);  // shortest round-trip-exact token

}  // namespace ddibp
