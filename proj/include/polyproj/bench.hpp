#pragma once
//------------------------------------------------------------------------------
// Machine trials on the unit cube and the standard simplex: random targets at
// a fixed distance from the barycenter, started either from the visible point
// on the barycenter ray or from a random visible vertex.
//------------------------------------------------------------------------------

#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numbers>
#include <string_view>
#include <thread>
#include <vector>

#include "polyproj/escape.hpp"

namespace polyproj {

//------------------------------------------------------------------------------
// Random numbers. xoshiro256** (Blackman and Vigna) seeded through splitmix64,
// so a seed reproduces the same stream on any platform. The standard library
// distributions are implementation-defined and are not used.
//------------------------------------------------------------------------------

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : s_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t s_;
};

class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  /// Independent stream `index` of `seed`.
  static Xoshiro256ss stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 sm(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return Xoshiro256ss(sm.next());
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal by Box-Muller; the second variate is discarded.
  double normal() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

//------------------------------------------------------------------------------
// Shapes
//------------------------------------------------------------------------------

enum class Shape { cube, simplex };
enum class StartStrategy { barycenter, vertex };

inline std::string_view to_string(Shape s) { return s == Shape::cube ? "cube" : "simplex"; }
inline std::string_view to_string(StartStrategy s) { return s == StartStrategy::barycenter ? "barycenter" : "vertex"; }

/// {x | 0 <= x_i <= 1}: rows x_i <= 1 first, then -x_i <= 0.
inline PolyhedronH make_cube(Index n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "dimension must be at least 1");
  Matrix a(2 * n, n);
  a << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  Vector b(2 * n);
  b << Vector::Ones(n), Vector::Zero(n);
  return PolyhedronH(std::move(a), std::move(b));
}

/// {x | x_i >= 0, sum x_i <= 1}: rows -x_i <= 0, then the sum row.
inline PolyhedronH make_simplex(Index n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "dimension must be at least 1");
  Matrix a(n + 1, n);
  a << -Matrix::Identity(n, n), Matrix::Ones(1, n);
  Vector b = Vector::Zero(n + 1);
  b(n) = 1.0;
  return PolyhedronH(std::move(a), std::move(b));
}

inline PolyhedronH make_shape(Shape s, Index n) { return s == Shape::cube ? make_cube(n) : make_simplex(n); }

inline Vector barycenter(Shape s, Index n) {
  return Vector::Constant(n, s == Shape::cube ? 0.5 : 1.0 / static_cast<double>(n + 1));
}

inline Vector random_vertex(Shape s, Index n, Xoshiro256ss& rng) {
  Vector v = Vector::Zero(n);
  if (s == Shape::cube) {
    for (Index i = 0; i < n; ++i) v(i) = static_cast<double>(rng.next() >> 63);
  } else {
    const auto k = rng.below(static_cast<std::uint64_t>(n + 1));
    if (k > 0) v(static_cast<Index>(k - 1)) = 1.0;
  }
  return v;
}

inline Vector random_target(const Vector& center, double dist, Xoshiro256ss& rng) {
  if (!(dist > 0.0)) throw Error(ErrorCode::InvalidInput, "target distance must be positive");
  Vector d(center.size());
  do {
    for (Index i = 0; i < d.size(); ++i) d(i) = rng.normal();
  } while (d.norm() == 0.0);
  return center + dist * d.normalized();
}

inline constexpr std::size_t kMaxVertexDraws = 1'000'000;

inline Vector start_point(Shape shape, const PolyhedronH& p, StartStrategy strategy, const Vector& target,
                          Xoshiro256ss& rng) {
  const Index n = p.dim();
  if (contains(p, target)) throw Error(ErrorCode::TargetInside, "target lies in the polyhedron");
  if (strategy == StartStrategy::barycenter) return visible_point(p, barycenter(shape, n), target);
  for (std::size_t draw = 0; draw < kMaxVertexDraws; ++draw) {
    Vector v = random_vertex(shape, n, rng);
    if (is_p_visible(p, v, target)) return v;
  }
  throw Error(ErrorCode::VertexSearchExhausted, "no visible vertex in 1e6 draws");
}

//------------------------------------------------------------------------------
// Trials
//------------------------------------------------------------------------------

struct TrialConfig {
  Shape shape = Shape::cube;
  Index dim = 10;
  std::size_t trials = 1000;
  StartStrategy start = StartStrategy::barycenter;
  double target_distance = 5.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  EnumeratorConfig enumerator;

  void validate() const {
    if (dim < 2) throw Error(ErrorCode::InvalidInput, "dim must be at least 2");
    if (trials < 1) throw Error(ErrorCode::InvalidInput, "trials must be at least 1");
    if (!(target_distance > 0.0)) throw Error(ErrorCode::InvalidInput, "target distance must be positive");
    if (threads < 1) throw Error(ErrorCode::InvalidInput, "threads must be at least 1");
    enumerator.validate();
  }
};

struct TrialResult {
  bool failed = false;
  std::size_t escapes = 0;
  std::size_t ascents = 0;
  double msec = 0.0;
  bool descent_ok = true;
  double clamp_error = 0.0;  // cube only
};

struct TrialStats {
  std::size_t trials = 0;
  double mean_steps = 0.0;
  std::size_t max_steps = 0;
  double mean_ascents = 0.0;
  std::size_t max_ascents = 0;
  std::size_t failures = 0;
  double mean_msec = 0.0;
  double max_msec = 0.0;
  std::size_t descent_violations = 0;
  /// Largest deviation from the clamped target over cube trials.
  std::optional<double> max_clamp_error;
};

/// True when every escape in the trace strictly lowers the distance.
inline bool strictly_descending(const Solution& s) {
  const auto& st = s.trace.steps;
  for (std::size_t i = 1; i < st.size(); ++i) {
    if (st[i].kind == StepKind::done) continue;
    if (!(st[i].distance < st[i - 1].distance)) return false;
  }
  return true;
}

inline TrialResult run_trial(const TrialConfig& cfg, const PolyhedronH& p, std::size_t index) {
  TrialResult r;
  Xoshiro256ss rng = Xoshiro256ss::stream(cfg.seed, index);
  try {
    const Vector target = random_target(barycenter(cfg.shape, cfg.dim), cfg.target_distance, rng);
    const Vector start = start_point(cfg.shape, p, cfg.start, target, rng);
    const auto t0 = std::chrono::steady_clock::now();
    const Solution sol = solve(p, target, start, cfg.enumerator);
    const auto t1 = std::chrono::steady_clock::now();
    r.msec = std::chrono::duration<double, std::milli>(t1 - t0).count();
    r.escapes = sol.escapes;
    r.ascents = sol.ascents;
    r.descent_ok = strictly_descending(sol);
    if (cfg.shape == Shape::cube) {
      r.clamp_error = (sol.point - target.cwiseMax(0.0).cwiseMin(1.0)).cwiseAbs().maxCoeff();
    }
  } catch (const Error&) {
    r.failed = true;
  }
  return r;
}

inline TrialStats run_trials(const TrialConfig& cfg) {
  cfg.validate();
  const PolyhedronH p = make_shape(cfg.shape, cfg.dim);
  std::vector<TrialResult> results(cfg.trials);

  const unsigned workers = std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.trials));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfg.trials; ++i) results[i] = run_trial(cfg, p, i);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < cfg.trials; i += workers) results[i] = run_trial(cfg, p, i);
      }));
    }
    for (auto& j : jobs) j.get();
  }

  TrialStats s;
  s.trials = cfg.trials;
  std::size_t ok = 0;
  for (const auto& r : results) {
    if (r.failed) {
      ++s.failures;
      continue;
    }
    ++ok;
    s.mean_steps += static_cast<double>(r.escapes);
    s.mean_ascents += static_cast<double>(r.ascents);
    s.mean_msec += r.msec;
    s.max_steps = std::max(s.max_steps, r.escapes);
    s.max_ascents = std::max(s.max_ascents, r.ascents);
    s.max_msec = std::max(s.max_msec, r.msec);
    if (!r.descent_ok) ++s.descent_violations;
    if (cfg.shape == Shape::cube) s.max_clamp_error = std::max(s.max_clamp_error.value_or(0.0), r.clamp_error);
  }
  if (ok > 0) {
    s.mean_steps /= static_cast<double>(ok);
    s.mean_ascents /= static_cast<double>(ok);
    s.mean_msec /= static_cast<double>(ok);
  }
  return s;
}

}  // namespace polyproj
