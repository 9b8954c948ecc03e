#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "toysae/datagen.hpp"
#include "toysae/matrix.hpp"

namespace toysae {

// f(x) = ReLU(W_out·W_in·x + b)
struct ToyModel {
  std::size_t n_s = 0, n_d = 0;
  Matrix W_in;             // n_d × n_s
  Matrix W_out;            // n_s × n_d
  std::vector<double> b;   // n_s
};

struct Gradients {
  Matrix dW_in, dW_out;
  std::vector<double> db;
};

inline void check_batch(const ToyModel& m, const SparseBatch& batch) {
  if (batch.data.cols() != m.n_s)
    throw std::invalid_argument("forward: batch width != n_s");
}

inline Matrix forward(const ToyModel& m, const SparseBatch& batch) {
  check_batch(m, batch);
  Matrix H = matmul(batch.data, m.W_in, false, true);  // n × n_d
  Matrix Y = matmul(H, m.W_out, false, true);          // n × n_s
  for (std::size_t i = 0; i < Y.rows(); ++i)
    for (std::size_t j = 0; j < Y.cols(); ++j) {
      double v = Y(i, j) + m.b[j];
      Y(i, j) = v > 0.0 ? v : 0.0;
    }
  return Y;
}

// mean over batch rows of ‖x − f(x)‖²  (total; divide by n_s for per-feature)
inline double loss(const ToyModel& m, const SparseBatch& batch) {
  Matrix Y = forward(m, batch);
  const double* x = batch.data.data();
  const double* y = Y.data();
  double acc = 0.0;
  for (std::size_t k = 0; k < Y.size(); ++k) {
    double d = x[k] - y[k];
    acc += d * d;
  }
  return acc / static_cast<double>(batch.n);
}

// exact gradients of the batch loss; ReLU' (0) = 0
inline double loss_and_grad(const ToyModel& m, const SparseBatch& batch,
                            Gradients& g) {
  check_batch(m, batch);
  const std::size_t n = batch.n;
  Matrix H = matmul(batch.data, m.W_in, false, true);
  Matrix P = matmul(H, m.W_out, false, true);  // pre-activations minus bias
  Matrix E(n, m.n_s);                          // dL/d(pre-activation)
  double acc = 0.0;
  const double scale = 2.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m.n_s; ++j) {
      double pre = P(i, j) + m.b[j];
      double y = pre > 0.0 ? pre : 0.0;
      double d = y - batch.data(i, j);
      acc += d * d;
      E(i, j) = (pre > 0.0) ? scale * d : 0.0;
    }
  g.dW_out = matmul(E, H, true, false);              // n_s × n_d
  Matrix dH = matmul(E, m.W_out, false, false);      // n × n_d
  g.dW_in = matmul(dH, batch.data, true, false);     // n_d × n_s
  g.db.assign(m.n_s, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m.n_s; ++j) g.db[j] += E(i, j);
  return acc / static_cast<double>(n);
}

// ---- TMSW weight files -----------------------------------------------------
// "TMSW", version 0x01, u32 n_s, u32 n_d, then f64 row-major W_in, W_out, b.
// Little-endian throughout.

namespace detail {

inline void put_u32(std::FILE* f, std::uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
  std::fwrite(buf, 1, 4, f);
}

inline bool get_u32(std::FILE* f, std::uint32_t& v) {
  unsigned char buf[4];
  if (std::fread(buf, 1, 4, f) != 4) return false;
  v = static_cast<std::uint32_t>(buf[0]) |
      (static_cast<std::uint32_t>(buf[1]) << 8) |
      (static_cast<std::uint32_t>(buf[2]) << 16) |
      (static_cast<std::uint32_t>(buf[3]) << 24);
  return true;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

}  // namespace detail

inline void save_model(const ToyModel& m, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("save_model: cannot open " + path);
  std::fwrite("TMSW", 1, 4, f);
  unsigned char version = 0x01;
  std::fwrite(&version, 1, 1, f);
  detail::put_u32(f, static_cast<std::uint32_t>(m.n_s));
  detail::put_u32(f, static_cast<std::uint32_t>(m.n_d));
  std::fwrite(m.W_in.data(), sizeof(double), m.W_in.size(), f);
  std::fwrite(m.W_out.data(), sizeof(double), m.W_out.size(), f);
  std::fwrite(m.b.data(), sizeof(double), m.b.size(), f);
  if (std::fclose(f) != 0)
    throw std::runtime_error("save_model: write failure on " + path);
}

inline ToyModel load_model(const std::string& path) {
  std::FILE* raw = std::fopen(path.c_str(), "rb");
  if (!raw) throw std::runtime_error("load_model: cannot open " + path);
  std::unique_ptr<std::FILE, detail::FileCloser> f(raw);
  char magic[4];
  if (std::fread(magic, 1, 4, raw) != 4 || std::memcmp(magic, "TMSW", 4) != 0)
    throw std::runtime_error("load_model: bad magic in " + path);
  unsigned char version = 0;
  if (std::fread(&version, 1, 1, raw) != 1 || version != 0x01)
    throw std::runtime_error("load_model: unsupported version in " + path);
  std::uint32_t n_s = 0, n_d = 0;
  if (!detail::get_u32(raw, n_s) || !detail::get_u32(raw, n_d))
    throw std::runtime_error("load_model: truncated header in " + path);
  if (n_s == 0 || n_d == 0 || n_d > n_s ||
      static_cast<std::uint64_t>(n_s) * n_d > (1ULL << 32))
    throw std::runtime_error("load_model: implausible dimensions in " + path);
  ToyModel m;
  m.n_s = n_s;
  m.n_d = n_d;
  m.W_in = Matrix(n_d, n_s);
  m.W_out = Matrix(n_s, n_d);
  m.b.assign(n_s, 0.0);
  auto read_block = [&](double* dst, std::size_t count, const char* what) {
    std::size_t got = std::fread(dst, sizeof(double), count, raw);
    if (got != count)
      throw std::runtime_error("load_model: truncated " + std::string(what) +
                               " after " + std::to_string(got) + " values in " +
                               path);
  };
  read_block(m.W_in.data(), m.W_in.size(), "W_in");
  read_block(m.W_out.data(), m.W_out.size(), "W_out");
  read_block(m.b.data(), m.b.size(), "b");
  return m;
}

}  // namespace toysae
