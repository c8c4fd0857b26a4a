#pragma once

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lmdpinn {

// ---------------------------------------------------------------------------
// Error taxonomy. Everything user-facing flows through these so the CLI can
// map failure classes to exit codes and messages uniformly.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value, unknown key, inconsistent shapes.
struct ConfigError : Error {
  using Error::Error;
};

/// Point not on the claimed face, out-of-domain coordinate, grid mismatch.
struct GeometryError : Error {
  using Error::Error;
};

/// Non-finite value or divergence in a numeric computation.
struct NumericsError : Error {
  using Error::Error;
};

/// Warm-start rejected (incompatible geometry or checkpoint version).
struct TransferError : Error {
  using Error::Error;
};

/// File format or filesystem failure.
struct IoError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Geometry primitives
// ---------------------------------------------------------------------------

/// A space-time sample in physical units (meters, seconds).
struct Point4 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;
};

/// Faces of the domain box, named by outward normal.
enum class Face : int { xmin = 0, xmax = 1, ymin = 2, ymax = 3, zmin = 4, zmax = 5 };

inline constexpr std::array<Face, 6> kAllFaces = {Face::xmin, Face::xmax, Face::ymin,
                                                  Face::ymax, Face::zmin, Face::zmax};

/// Spatial axis of the face normal: 0=x, 1=y, 2=z.
inline constexpr int face_axis(Face f) { return static_cast<int>(f) / 2; }

/// Sign of the outward normal along face_axis: -1 or +1.
inline constexpr double face_normal_sign(Face f) {
  return (static_cast<int>(f) % 2 == 0) ? -1.0 : 1.0;
}

inline const char* face_name(Face f) {
  switch (f) {
    case Face::xmin: return "xmin";
    case Face::xmax: return "xmax";
    case Face::ymin: return "ymin";
    case Face::ymax: return "ymax";
    case Face::zmin: return "zmin";
    case Face::zmax: return "zmax";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Deterministic random numbers.
//
// std::uniform_real_distribution is not bit-stable across standard libraries,
// so all sampling in this project draws through this helper instead.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  /// Raw 64-bit draw (splitmix64; passes standard statistical batteries and
  /// is reproducible everywhere).
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Derive an independent stream (for per-component seeding).
  Rng fork() { return Rng(next_u64()); }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Shortest round-trip formatting for doubles. Used by the config writer and
// CSV emitters so serialized artifacts are byte-stable and re-parse exactly.
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericsError("format_double: conversion failed");
  return std::string(buf, ptr);
}

inline double parse_double(const std::string& s, const std::string& where) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(b, e, v);
  while (ptr < e && (*ptr == ' ' || *ptr == '\t')) ++ptr;
  if (ec != std::errc() || ptr != e)
    throw ConfigError(where + ": not a number: '" + s + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Block-parallel execution with a deterministic result contract: callers
// partition work into blocks, workers fill disjoint slots, and any reduction
// happens sequentially by block index afterwards. Results are bit-identical
// for any thread count.
// ---------------------------------------------------------------------------

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(block_index, worker_index) for block_index in [0, n_blocks).
/// worker_index < n_threads identifies reusable per-worker scratch space.
inline void parallel_blocks(int n_blocks, int n_threads,
                            const std::function<void(int, int)>& fn) {
  n_threads = std::min(resolve_thread_count(n_threads), std::max(n_blocks, 1));
  if (n_threads <= 1 || n_blocks <= 1) {
    for (int b = 0; b < n_blocks; ++b) fn(b, 0);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error = nullptr;
  std::atomic<bool> failed{false};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          int b = next.fetch_add(1);
          if (b >= n_blocks || failed.load()) break;
          fn(b, w);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
        failed.store(true);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) { first_error = err; break; }
  if (first_error) std::rethrow_exception(first_error);
}

/// FNV-1a over raw bytes; used for checkpoint identities.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace lmdpinn
