#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>

#include "opeq/sym_matrix.hpp"

namespace opeq {

/// On-disk matrix document. The text format is whitespace-insensitive with
/// '#' comments:
///
///   # optional comment
///   name A          (optional, single token)
///   dim 2
///   data
///   1 0
///   0 2
///
/// `data` holds dim*dim reals in row-major order and must follow `dim`.
struct MatrixDocument {
  Eigen::Index dim = 0;
  Eigen::MatrixXd data;
  std::string name;
  double max_asymmetry = 0.0;     // max |data - data^T| observed at load
  bool asymmetry_warning = false;  // max_asymmetry > 1e-9 * max(1, max|entry|)

  SymMatrix<double> to_sym() const { return SymMatrix<double>(data); }

  static MatrixDocument from_matrix(const Eigen::MatrixXd& m, std::string name = {});
};

MatrixDocument parse_matrix_document(std::string_view text);
MatrixDocument load_matrix_document(const std::string& path);

/// Serializes in the loader's format; `significant_digits` 17 round-trips
/// doubles exactly, 6 matches the human display precision.
std::string serialize_matrix_document(const MatrixDocument& doc,
                                      int significant_digits = 17);
void save_matrix_document(const MatrixDocument& doc, const std::string& path,
                          int significant_digits = 17);

/// 64-bit FNV-1a digest as 16 hex characters; used for input fingerprints in
/// run reports.
std::string fnv1a_digest(std::string_view bytes);

std::string read_file(const std::string& path);

}  // namespace opeq
