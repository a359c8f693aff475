#include "ddibp/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ddibp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::vector<std::string>> read_cells(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_value(const std::string& tok, const std::string& path) {
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  if (tok.empty() || tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": bad numeric token '" + tok + "'");
  }
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  const auto cells = read_cells(path);
  if (cells.empty()) throw std::runtime_error(path + ": empty matrix");
  const std::size_t cols = cells[0].size();
  Eigen::MatrixXd m(static_cast<int>(cells.size()), static_cast<int>(cols));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].size() != cols) throw std::runtime_error(path + ": ragged rows");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<int>(i), static_cast<int>(j)) = parse_value(cells[i][j], path);
    }
  }
  return m;
}

DataMatrix read_data_csv(const std::string& path) {
  const Eigen::MatrixXd raw = read_matrix_csv(path);
  Eigen::MatrixXd x = raw;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> miss(raw.rows(), raw.cols());
  for (int i = 0; i < raw.rows(); ++i) {
    for (int j = 0; j < raw.cols(); ++j) {
      const bool m = std::isnan(raw(i, j));
      miss(i, j) = m;
      if (m) x(i, j) = 0.0;  // placeholder until the sampler imputes
      if (std::isinf(raw(i, j))) throw std::runtime_error(path + ": data entries must be finite");
    }
  }
  return DataMatrix::with_mask(std::move(x), std::move(miss));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shorter form when it round-trips exactly.
  for (int prec = 1; prec < 17; ++prec) {
    char cand[40];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(cand, "%lf", &back);
    if (back == v) return cand;
  }
  return buf;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXi& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

}  // namespace ddibp
