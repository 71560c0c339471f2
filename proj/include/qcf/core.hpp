#pragma once

#include <cstdint>
#include <cstdio>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcf {

using PointId = std::uint32_t;

constexpr PointId kNoPoint = static_cast<PointId>(-1);

// Relative tolerance for threshold decisions and verification asserts.
// All constructive comparisons go through geq/leq so that rescaling every
// distance by a constant factor flips no decision (acceptance: scaling
// invariance).
constexpr double kRelTol = 1e-9;

inline double tol_scale(double a, double b) {
  return std::max(std::abs(a), std::abs(b));
}

// a >= b up to relative tolerance
inline bool geq(double a, double b) { return a >= b - kRelTol * tol_scale(a, b); }
// a <= b up to relative tolerance
inline bool leq(double a, double b) { return a <= b + kRelTol * tol_scale(a, b); }
// strict a < b beyond tolerance
inline bool lt(double a, double b) { return !geq(a, b); }
inline bool gt(double a, double b) { return !leq(a, b); }

// ---------------------------------------------------------------------------
// Errors. CLI maps these onto exit codes: InvalidInput -> 4,
// ConstructionFailure -> 3, VerificationFailure -> 2.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct ConstructionFailure : Error {
  using Error::Error;
};

struct VerificationFailure : Error {
  using Error::Error;
};

// Annulus sub-step-graph fails to connect the required points: the space is
// not annularly linearly connected at this location and scale.
struct AnnulusDisconnected : ConstructionFailure {
  PointId center;
  double r_in, r_out;
  AnnulusDisconnected(PointId c, double ri, double ro, const std::string& stage)
      : ConstructionFailure("annulus disconnection at point " + std::to_string(c) +
                            ", radii [" + std::to_string(ri) + ", " + std::to_string(ro) +
                            "] (stage: " + stage + ")"),
        center(c), r_in(ri), r_out(ro) {}
};

// ---------------------------------------------------------------------------
// Deterministic RNG (splitmix64). Seeded streams fork without shared state so
// restart batches are order-independent.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint32_t below(std::uint32_t n) { return n == 0 ? 0 : static_cast<std::uint32_t>(next() % n); }

  Rng fork(std::uint64_t stream) const {
    Rng r(state_ ^ (0xd1342543de82ef95ULL * (stream + 1)));
    r.next();
    return r;
  }

 private:
  std::uint64_t state_;
};

// Stateless symmetric hash for edge jitter: deterministic per (seed, edge).
inline double edge_jitter(std::uint64_t seed, PointId a, PointId b) {
  if (a > b) std::swap(a, b);
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(a) << 32 | b));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// PointMask: dense bitset over the points of one space.
// ---------------------------------------------------------------------------

class PointMask {
 public:
  PointMask() : n_(0) {}
  explicit PointMask(std::uint32_t n, bool filled = false)
      : words_((n + 63) / 64, filled ? ~0ULL : 0ULL), n_(n) {
    if (filled && n % 64) words_.back() = (1ULL << (n % 64)) - 1;
  }

  std::uint32_t universe() const { return n_; }

  void set(PointId i) { words_[i >> 6] |= 1ULL << (i & 63); }
  void reset(PointId i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
  bool test(PointId i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  bool intersects(const PointMask& o) const {
    std::size_t m = std::min(words_.size(), o.words_.size());
    for (std::size_t w = 0; w < m; ++w)
      if (words_[w] & o.words_[w]) return true;
    return false;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  bool empty() const {
    for (auto w : words_) if (w) return false;
    return true;
  }

  PointMask& operator|=(const PointMask& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }
  PointMask& operator&=(const PointMask& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
    return *this;
  }
  PointMask& subtract(const PointMask& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~o.words_[w];
    return *this;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        unsigned b = static_cast<unsigned>(__builtin_ctzll(bits));
        fn(static_cast<PointId>(w * 64 + b));
        bits &= bits - 1;
      }
    }
  }

  std::vector<PointId> to_vector() const {
    std::vector<PointId> v;
    v.reserve(count());
    for_each([&](PointId p) { v.push_back(p); });
    return v;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::uint32_t n_;
};

// %.17g float formatting: exact double round-trip, byte-stable output.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace qcf
