#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gts {

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptySilhouette : Error { EmptySilhouette() : Error("silhouette has no foreground pixels") {} };
struct AspectOverflow : Error { AspectOverflow() : Error("scaled silhouette wider than the canvas") {} };
struct NoCycleFound : Error { explicit NoCycleFound(const std::string& why = "no gait cycle found") : Error(why) {} };
struct DimensionMismatch : Error { DimensionMismatch() : Error("grid dimensions do not match") {} };
struct InsufficientTuningData : Error { explicit InsufficientTuningData(const std::string& why) : Error(why) {} };
struct DegenerateData : Error { DegenerateData() : Error("data has zero total variance") {} };
struct SingularScatter : Error { SingularScatter() : Error("within-class scatter is singular") {} };
struct UnfittedModel : Error { UnfittedModel() : Error("model has not been fitted") {} };
struct EmptyGallery : Error { EmptyGallery() : Error("gallery is empty") {} };
struct DegenerateTrajectory : Error { DegenerateTrajectory() : Error("trajectory too short to define slopes") {} };
struct EmptyCorpus : Error { EmptyCorpus() : Error("no silhouette files found under corpus root") {} };
struct TooFewSubjects : Error { explicit TooFewSubjects(const std::string& why) : Error(why) {} };
struct LengthMismatch : Error { LengthMismatch() : Error("prediction and truth lists differ in length") {} };
struct EmptyInput : Error { EmptyInput() : Error("input is empty") {} };
struct IoFailure : Error { explicit IoFailure(const std::string& why) : Error(why) {} };

// ---------------------------------------------------------------------------
// Grid: dense row-major 2-D array indexed as (row, col).

template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T value = T{})
      : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols, value) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return cells_.size(); }

  T& operator()(int r, int c) { return cells_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return cells_[static_cast<std::size_t>(r) * cols_ + c]; }

  T* data() { return cells_.data(); }
  const T* data() const { return cells_.data(); }

  void fill(T value) { std::fill(cells_.begin(), cells_.end(), value); }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.cells_ == b.cells_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> cells_;
};

// ---------------------------------------------------------------------------
// Rounding convention used everywhere a decoded or scaled coordinate must
// become a pixel index: nearest integer, ties upward.

inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

// ---------------------------------------------------------------------------
// Rng: deterministic draws on top of mt19937_64. The standard library's
// distributions are implementation-defined, so every draw shape is spelled
// out here to keep runs byte-reproducible across compilers.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return real01() < p; }

  // Uniform in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::mt19937_64 engine_;
};

// Derive an independent stream seed from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// First k of a random permutation of [0, n), Fisher-Yates.
inline std::vector<int> sample_without_replacement(int k, int n, Rng& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

// ---------------------------------------------------------------------------
// FNV-1a content hashing for cache keys.

class Fnv1a {
 public:
  void update(const void* bytes, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(const std::string& s) { update(s.data(), s.size()); }
  template <typename T>
  void update_value(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    update(&v, sizeof(v));
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

// ---------------------------------------------------------------------------
// parallel_for: run fn(i) for i in [0, n) on up to `jobs` threads. Exceptions
// from workers are rethrown in the caller (first one wins).

inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Little-endian binary stream helpers for the file formats.

namespace io {

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!os) throw IoFailure("write failed");
}

inline void read_bytes(std::istream& is, void* p, std::size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) throw IoFailure("unexpected end of file");
}

template <typename T>
void write_le(std::ostream& os, T v) {
  static_assert(std::is_integral_v<T>);
  unsigned char buf[sizeof(T)];
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  write_bytes(os, buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  static_assert(std::is_integral_v<T>);
  unsigned char buf[sizeof(T)];
  read_bytes(is, buf, sizeof(T));
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(buf[i]) << (8 * i);
  return static_cast<T>(u);
}

inline void write_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_le<std::uint32_t>(os, bits);
}

inline float read_f32(std::istream& is) {
  const std::uint32_t bits = read_le<std::uint32_t>(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

inline void write_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_le<std::uint64_t>(os, bits);
}

inline double read_f64(std::istream& is) {
  const std::uint64_t bits = read_le<std::uint64_t>(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  write_bytes(os, s.data(), s.size());
}

inline std::string read_string(std::istream& is) {
  const auto n = read_le<std::uint32_t>(is);
  std::string s(n, '\0');
  if (n > 0) read_bytes(is, s.data(), n);
  return s;
}

}  // namespace io

}  // namespace gts
