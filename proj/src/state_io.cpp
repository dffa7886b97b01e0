#include "eofsep/state_io.hpp"

#include "eofsep/errors.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace eofsep {

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> tokens;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string word;
    while (words >> word) tokens.push_back({word, number});
  }
  return tokens;
}

double to_double(const Token& token) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token.text, &used);
    if (used != token.text.size()) throw std::invalid_argument(token.text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(token.line, "expected a number, got '" + token.text + "'");
  }
}

std::size_t to_dimension(const Token& token) {
  const double v = to_double(token);
  if (v < 2.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ParseError(token.line, "dimension must be an integer >= 2, got '" + token.text + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

DensityMatrix read_state(std::istream& in) {
  const std::vector<Token> tokens = tokenize(in);
  if (tokens.empty()) throw ParseError(1, "empty state file");
  if (tokens[0].text != "DIM") {
    throw ParseError(tokens[0].line, "expected 'DIM n1 n2' header, got '" + tokens[0].text + "'");
  }
  if (tokens.size() < 3) throw ParseError(tokens[0].line, "incomplete DIM header");
  const BipartiteDims dims{to_dimension(tokens[1]), to_dimension(tokens[2])};
  const auto n = static_cast<Eigen::Index>(dims.total());
  const std::size_t expected = 3 + 2 * dims.total() * dims.total();
  if (tokens.size() < expected) {
    throw ParseError(tokens.back().line,
                     "expected " + std::to_string(n * n) + " complex entries, got " +
                         std::to_string((tokens.size() - 3) / 2) +
                         ((tokens.size() - 3) % 2 ? " and a dangling real part" : ""));
  }
  if (tokens.size() > expected) {
    throw ParseError(tokens[expected].line, "trailing data after matrix entries");
  }
  ComplexMatrix m(n, n);
  std::size_t pos = 3;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = to_double(tokens[pos]);
      const double im = to_double(tokens[pos + 1]);
      m(i, j) = Complex(re, im);
      pos += 2;
    }
  }
  return DensityMatrix(dims, m);
}

DensityMatrix read_state_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open state file " + path.string());
  return read_state(in);
}

void write_state(std::ostream& out, const BipartiteDims& dims, const ComplexMatrix& matrix) {
  out << "DIM " << dims.n1 << ' ' << dims.n2 << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << "  ";
      out << matrix(i, j).real() << ' ' << matrix(i, j).imag();
    }
    out << '\n';
  }
}

void write_state_file(const std::filesystem::path& path, const DensityMatrix& rho) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write state file " + path.string());
  write_state(out, rho.dims(), rho.matrix());
}

}  // namespace eofsep
