#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "nlfem/assembly.hpp"

namespace nlfem {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>((v >> (8 * k)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("truncated dense matrix header");
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
  return v;
}

void put_f64(std::ostream& os, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated dense matrix data");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace

void write_coo(std::ostream& os, const Eigen::MatrixXd& a) {
  long nnz = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) nnz += a(i, j) != 0.0;
  os << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) os << i << ' ' << j << ' ' << a(i, j) << '\n';
}

void write_coo(std::ostream& os, const SparseMatrix& a) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> r = a;
  long nnz = 0;
  for (int i = 0; i < r.outerSize(); ++i)
    for (decltype(r)::InnerIterator it(r, i); it; ++it) nnz += it.value() != 0.0;
  os << r.rows() << ' ' << r.cols() << ' ' << nnz << '\n' << std::setprecision(17);
  for (int i = 0; i < r.outerSize(); ++i)
    for (decltype(r)::InnerIterator it(r, i); it; ++it)
      if (it.value() != 0.0) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

void write_coo(const std::string& path, const Eigen::MatrixXd& a) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_coo(os, a);
}

Eigen::MatrixXd read_coo(std::istream& is) {
  long rows, cols, nnz;
  if (!(is >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
    throw std::runtime_error("malformed coordinate-format header");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  for (long k = 0; k < nnz; ++k) {
    long i, j;
    double v;
    if (!(is >> i >> j >> v) || i < 0 || i >= rows || j < 0 || j >= cols)
      throw std::runtime_error("malformed coordinate-format entry " + std::to_string(k));
    a(i, j) = v;
  }
  return a;
}

void write_dense_binary(std::ostream& os, const Eigen::MatrixXd& a) {
  put_u32(os, static_cast<std::uint32_t>(a.rows()));
  put_u32(os, static_cast<std::uint32_t>(a.cols()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) put_f64(os, a(i, j));
}

void write_dense_binary(const std::string& path, const Eigen::MatrixXd& a) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_dense_binary(os, a);
}

Eigen::MatrixXd read_dense_binary(std::istream& is) {
  const std::uint32_t rows = get_u32(is), cols = get_u32(is);
  Eigen::MatrixXd a(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) a(i, j) = get_f64(is);
  return a;
}

Eigen::MatrixXd read_dense_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_dense_binary(is);
}

}  // namespace nlfem
