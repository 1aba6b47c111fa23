#include "opeq/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "opeq/errors.hpp"

namespace opeq {

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool in_comment = false;
  for (const char c : text) {
    if (c == '\n') in_comment = false;
    if (in_comment) continue;
    if (c == '#') {
      in_comment = true;
      if (!current.empty()) tokens.push_back(std::exchange(current, {}));
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::exchange(current, {}));
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double parse_real(const std::string& token) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    raise(ErrorCode::ParseError, "matrix document: bad number '" + token + "'");
  return value;
}

long parse_integer(const std::string& token) {
  long value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    raise(ErrorCode::ParseError, "matrix document: bad integer '" + token + "'");
  return value;
}

void finish_document(MatrixDocument& doc) {
  const double scale = std::max(1.0, doc.data.cwiseAbs().maxCoeff());
  doc.max_asymmetry = (doc.data - doc.data.transpose()).cwiseAbs().maxCoeff();
  doc.asymmetry_warning = doc.max_asymmetry > 1e-9 * scale;
}

}  // namespace

MatrixDocument MatrixDocument::from_matrix(const Eigen::MatrixXd& m,
                                           std::string name) {
  if (m.rows() != m.cols() || m.rows() < 1)
    raise(ErrorCode::BadArgument, "MatrixDocument: matrix must be square, dim >= 1");
  MatrixDocument doc;
  doc.dim = m.rows();
  doc.data = m;
  doc.name = std::move(name);
  finish_document(doc);
  return doc;
}

MatrixDocument parse_matrix_document(std::string_view text) {
  const std::vector<std::string> tokens = tokenize(text);
  MatrixDocument doc;
  bool have_dim = false;
  bool have_data = false;
  std::size_t pos = 0;
  const auto next = [&](const char* what) -> const std::string& {
    if (pos >= tokens.size())
      raise(ErrorCode::ParseError,
            std::string("matrix document: missing ") + what);
    return tokens[pos++];
  };
  while (pos < tokens.size()) {
    const std::string& key = tokens[pos++];
    if (key == "name") {
      doc.name = next("value after 'name'");
    } else if (key == "dim") {
      const long dim = parse_integer(next("value after 'dim'"));
      if (dim < 1) raise(ErrorCode::ParseError, "matrix document: dim must be >= 1");
      doc.dim = dim;
      have_dim = true;
    } else if (key == "data") {
      if (!have_dim)
        raise(ErrorCode::ParseError, "matrix document: 'dim' must precede 'data'");
      doc.data.resize(doc.dim, doc.dim);
      for (Eigen::Index i = 0; i < doc.dim; ++i)
        for (Eigen::Index j = 0; j < doc.dim; ++j)
          doc.data(i, j) = parse_real(next("matrix entry"));
      have_data = true;
    } else {
      raise(ErrorCode::ParseError,
            "matrix document: unexpected token '" + key + "'");
    }
  }
  if (!have_dim || !have_data)
    raise(ErrorCode::ParseError, "matrix document: needs both 'dim' and 'data'");
  if (!doc.data.allFinite())
    raise(ErrorCode::NonFinite, "matrix document: non-finite entries");
  finish_document(doc);
  return doc;
}

MatrixDocument load_matrix_document(const std::string& path) {
  return parse_matrix_document(read_file(path));
}

std::string serialize_matrix_document(const MatrixDocument& doc,
                                      int significant_digits) {
  std::ostringstream out;
  out.precision(significant_digits);
  if (!doc.name.empty()) out << "name " << doc.name << "\n";
  out << "dim " << doc.dim << "\n";
  out << "data\n";
  for (Eigen::Index i = 0; i < doc.dim; ++i) {
    for (Eigen::Index j = 0; j < doc.dim; ++j) {
      if (j > 0) out << ' ';
      out << doc.data(i, j);
    }
    out << '\n';
  }
  return out.str();
}

void save_matrix_document(const MatrixDocument& doc, const std::string& path,
                          int significant_digits) {
  std::ofstream file(path);
  if (!file) raise(ErrorCode::ParseError, "cannot open for writing: " + path);
  file << serialize_matrix_document(doc, significant_digits);
}

std::string fnv1a_digest(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) raise(ErrorCode::ParseError, "cannot open file: " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

}  // namespace opeq
