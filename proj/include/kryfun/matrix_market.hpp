#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "kryfun/sparse.hpp"
#include "kryfun/types.hpp"

namespace kryfun {

namespace detail {

inline std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

/// Reads a Matrix Market coordinate file (real, general or symmetric) into a
/// square SparseMatrix. Symmetric files have their off-diagonal entries
/// mirrored. Parse failures report the offending line number.
inline SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);

  std::size_t line_no = 0;
  std::string line;

  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || detail::lowercase(object) != "matrix")
    throw ParseError("not a MatrixMarket matrix file", line_no);
  if (detail::lowercase(format) != "coordinate")
    throw ParseError("only coordinate format is supported", line_no);
  if (detail::lowercase(field) != "real")
    throw ParseError("only real matrices are supported", line_no);
  const std::string sym = detail::lowercase(symmetry);
  if (sym != "general" && sym != "symmetric")
    throw ParseError("only general or symmetric matrices are supported", line_no);

  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      std::size_t first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (line[first] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_content_line()) throw ParseError("missing size line", line_no + 1);
  long long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream sizes(line);
    if (!(sizes >> rows >> cols >> nnz)) throw ParseError("malformed size line", line_no);
  }
  if (rows != cols) throw ParseError("matrix is not square", line_no);
  if (rows <= 0 || nnz < 0) throw ParseError("invalid dimensions", line_no);

  std::vector<std::tuple<Index, Index, double>> entries;
  entries.reserve(static_cast<std::size_t>(sym == "symmetric" ? 2 * nnz : nnz));
  for (long long k = 0; k < nnz; ++k) {
    if (!next_content_line()) throw ParseError("unexpected end of file", line_no + 1);
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v)) throw ParseError("malformed entry", line_no);
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError("entry index out of range", line_no);
    entries.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
    if (sym == "symmetric" && i != j)
      entries.emplace_back(static_cast<Index>(j - 1), static_cast<Index>(i - 1), v);
  }
  return SparseMatrix::from_triplets(static_cast<Index>(rows), std::move(entries));
}

/// Writes A in Matrix Market coordinate/real/general form with 17 significant
/// digits, enough for an exact write -> read round trip.
inline void write_matrix_market(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_market: cannot open '" + path + "'");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.size() << " " << a.size() << " " << a.nnz() << "\n";
  char buf[64];
  for (Index i = 0; i < a.size(); ++i) {
    for (Index k = a.row_ptr()[static_cast<std::size_t>(i)];
         k < a.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(i + 1),
                    static_cast<long long>(a.col_idx()[static_cast<std::size_t>(k)] + 1),
                    a.values()[static_cast<std::size_t>(k)]);
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write_matrix_market: write failed for '" + path + "'");
}

}  // namespace kryfun
