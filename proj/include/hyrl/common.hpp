#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace hyrl {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Wraps an angle into [0, 2pi).
double wrap_angle(double theta);

// Signed difference a-b wrapped into (-pi, pi].
double angle_diff(double a, double b);

inline double angle_of(const Vec2& v) { return wrap_angle(std::atan2(v.y, v.x)); }
inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Rotates v by angle delta around the origin.
Vec2 rotate(const Vec2& v, double delta);

inline double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Deterministic seedable RNG with explicitly coded transforms so results do
// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}

  uint64_t next_u64();
  // Uniform in [0, 1).
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Inclusive integer range [lo, hi].
  int uniform_int(int lo, int hi);
  // Standard normal via Box-Muller.
  double normal();

  // Derives an independent stream; `tag` distinguishes streams from one seed.
  Rng split(uint64_t tag) const;

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

uint64_t splitmix64(uint64_t x);

// Shortest printable representation that round-trips a double exactly.
std::string format_double(double v);

}  // namespace hyrl
