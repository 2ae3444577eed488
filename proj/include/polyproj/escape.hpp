#pragma once
//------------------------------------------------------------------------------
// Nearest point of a polyhedron to an external target by face escapes.
//
// From a feasible point e with tight rows S, an escape moves e toward the
// projection of the target onto {x | A_S x = b_S}, clipped to stay feasible.
// When no escape exists along the current face, the codimension-1 superfaces
// are enumerated (size r-1 subsets of S, r = rank A_S) and tried in turn. The
// iteration stops when neither finds an escape; the final point is then the
// nearest point.
//------------------------------------------------------------------------------

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "polyproj/polyhedron.hpp"

namespace polyproj {

enum class EnumeratorKind { simple, rank_filtered };

struct EnumeratorConfig {
  EnumeratorKind kind = EnumeratorKind::simple;
  /// Per-enumeration cap on the number of subsets tried.
  std::optional<std::size_t> max_subsets;

  void validate() const {
    if (max_subsets && *max_subsets < 1) throw Error(ErrorCode::InvalidInput, "max_subsets must be at least 1");
  }
};

enum class StepKind { start, escape_current_face, escape_enumerated_face, done };

inline std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::start: return "start";
    case StepKind::escape_current_face: return "escape-on-current-face";
    case StepKind::escape_enumerated_face: return "escape-on-enumerated-face";
    case StepKind::done: return "done";
  }
  return "?";
}

struct TraceStep {
  Vector point;
  double distance = 0.0;
  StepKind kind = StepKind::start;
  IndexList active_rows;
  std::optional<IndexList> enumerated_subset;
};

struct EscapeTrace {
  std::vector<TraceStep> steps;
};

struct Solution {
  Vector point;
  double distance = 0.0;
  EscapeTrace trace;
  std::size_t escapes = 0;
  std::size_t ascents = 0;
  /// Set when max_subsets cut an enumeration short; the point is then not
  /// certified optimal.
  bool enumeration_truncated = false;
};

namespace detail {

inline Vector esc_unchecked(const PolyhedronH& p, std::span<const Index> rows, const Vector& e0, const Vector& target) {
  Vector pi = target;
  if (!rows.empty()) {
    const RankLU f = rank_lu(select_rows(p.a(), rows));
    pi -= pinv_projection(f, target - e0);
  }
  const Vector d = pi - e0;
  if (d.norm() <= kMoveRelTol * (1.0 + e0.norm())) return e0;
  return e0 + clip_ray(p, e0, d) * d;
}

}  // namespace detail

/// One escape attempt along {x | A_rows x = b_rows}; returns e0 when no
/// movement is possible.
inline Vector esc(const PolyhedronH& p, std::span<const Index> rows, const Vector& e0, const Vector& target) {
  check_dim(p, target);
  if (!contains(p, e0)) throw Error(ErrorCode::PreconditionViolated, "escape base point is infeasible");
  for (Index r : rows) {
    if (r < 0 || r >= p.rows()) throw Error(ErrorCode::PreconditionViolated, "row index out of range");
    if (!p.row_tight(r, e0)) {
      throw Error(ErrorCode::PreconditionViolated, "row " + std::to_string(r) + " is not tight at the base point");
    }
  }
  return detail::esc_unchecked(p, rows, e0, target);
}

/// Lazily yields the size r-1 subsets of the active rows in lexicographic order.
class SubsetEnumerator {
 public:
  SubsetEnumerator(const PolyhedronH& p, IndexList rows, Index rank, EnumeratorConfig cfg)
      : p_(&p), rows_(std::move(rows)), size_(rank - 1), cfg_(cfg) {
    std::sort(rows_.begin(), rows_.end());
    if (rank < 2 || size_ > static_cast<Index>(rows_.size())) {
      exhausted_ = true;
      return;
    }
    pos_.resize(static_cast<std::size_t>(size_));
    std::iota(pos_.begin(), pos_.end(), std::size_t{0});
  }

  std::optional<IndexList> next() {
    while (!exhausted_) {
      if (cfg_.max_subsets && yielded_ >= *cfg_.max_subsets) {
        truncated_ = true;
        return std::nullopt;
      }
      IndexList subset(pos_.size());
      for (std::size_t i = 0; i < pos_.size(); ++i) subset[i] = rows_[pos_[i]];
      advance();
      if (cfg_.kind == EnumeratorKind::rank_filtered && numerical_rank(select_rows(p_->a(), subset)) < size_) continue;
      ++yielded_;
      return subset;
    }
    return std::nullopt;
  }

  bool truncated() const { return truncated_; }

 private:
  void advance() {
    const std::size_t k = pos_.size();
    const std::size_t n = rows_.size();
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (pos_[i] < n - k + i) {
        ++pos_[i];
        for (std::size_t j = i + 1; j < k; ++j) pos_[j] = pos_[j - 1] + 1;
        return;
      }
    }
    exhausted_ = true;
  }

  const PolyhedronH* p_;
  IndexList rows_;
  Index size_;
  EnumeratorConfig cfg_;
  std::vector<std::size_t> pos_;
  std::size_t yielded_ = 0;
  bool exhausted_ = false;
  bool truncated_ = false;
};

/// Materialized form of SubsetEnumerator.
inline std::vector<IndexList> simple_enumerator(const PolyhedronH& p, const ActiveSet& active, EnumeratorConfig cfg = {}) {
  cfg.validate();
  std::vector<IndexList> out;
  SubsetEnumerator en(p, active.rows, active.rank, cfg);
  while (auto s = en.next()) out.push_back(std::move(*s));
  return out;
}

namespace detail {

inline void push_step(Solution& sol, const Vector& point, const Vector& target, StepKind kind, IndexList active,
                      std::optional<IndexList> subset = std::nullopt) {
  sol.trace.steps.push_back({point, (point - target).norm(), kind, std::move(active), std::move(subset)});
}

// The escape loop from any feasible start. An escape is accepted only when it
// moves the point and strictly lowers the distance to the target.
inline Solution escape_loop(const PolyhedronH& p, const Vector& target, const Vector& start, const EnumeratorConfig& cfg) {
  const std::size_t limit = 10 * static_cast<std::size_t>(p.rows() + p.dim());
  Solution sol;
  Vector e = start;
  double dist = (e - target).norm();
  IndexList rows = tight_rows(p, e);
  push_step(sol, e, target, StepKind::start, rows);

  auto accept = [&](const Vector& next, StepKind kind, std::optional<IndexList> subset) {
    if (!moved(e, next)) return false;
    const double nd = (next - target).norm();
    if (!(nd < dist)) return false;
    e = next;
    dist = nd;
    rows = tight_rows(p, e);
    ++sol.escapes;
    if (kind == StepKind::escape_enumerated_face) ++sol.ascents;
    push_step(sol, e, target, kind, rows, std::move(subset));
    if (sol.escapes > limit) {
      throw Error(ErrorCode::SafeguardExceeded, "more than " + std::to_string(limit) + " escapes");
    }
    return true;
  };

  bool done = false;
  while (!done) {
    done = true;
    if (accept(esc_unchecked(p, rows, e, target), StepKind::escape_current_face, std::nullopt)) {
      done = false;
      continue;
    }
    const Index rank = numerical_rank(select_rows(p.a(), rows));
    if (rank > 1) {
      SubsetEnumerator en(p, rows, rank, cfg);
      while (auto subset = en.next()) {
        if (accept(esc_unchecked(p, *subset, e, target), StepKind::escape_enumerated_face, *subset)) {
          done = false;
          break;
        }
      }
      if (done && en.truncated()) sol.enumeration_truncated = true;
    }
  }

  push_step(sol, e, target, StepKind::done, rows);
  sol.point = e;
  sol.distance = dist;
  return sol;
}

}  // namespace detail

/// Nearest point of p to target, starting from a target-visible feasible point.
/// Polyhedra with equalities are solved in the reduced coordinates of their
/// affine hull; the trace is reported in the original coordinates.
inline Solution solve(const PolyhedronH& p, const Vector& target, const Vector& start, const EnumeratorConfig& cfg = {}) {
  cfg.validate();
  check_dim(p, target);
  check_dim(p, start);
  if (contains(p, target)) throw Error(ErrorCode::TargetInside, "target lies in the polyhedron");
  if (!contains(p, start)) throw Error(ErrorCode::StartNotVisible, "start point is infeasible");

  if (!p.has_equalities()) {
    if (!is_p_visible(p, start, target)) throw Error(ErrorCode::StartNotVisible, "start point is not target-visible");
    return detail::escape_loop(p, target, start, cfg);
  }

  // Inside the affine hull the first escape (along the hull itself) lands on a
  // visible point, so any feasible start works.
  const FullDimReduction red = reduce_to_full_dimension(p, target);
  const Vector hull_target = red.from_reduced(red.q_reduced);
  const double offset2 = (target - hull_target).squaredNorm();
  Solution inner;
  if (contains(red.reduced, red.q_reduced)) {
    inner.trace.steps.push_back({red.to_reduced(start), 0.0, StepKind::start, {}, std::nullopt});
    const Vector s = red.to_reduced(start);
    if (moved(s, red.q_reduced)) {
      inner.trace.steps.push_back({red.q_reduced, 0.0, StepKind::escape_current_face, {}, std::nullopt});
      inner.escapes = 1;
    }
    inner.trace.steps.push_back({red.q_reduced, 0.0, StepKind::done, {}, std::nullopt});
  } else {
    inner = detail::escape_loop(red.reduced, red.q_reduced, red.to_reduced(start), cfg);
  }

  Solution sol;
  sol.escapes = inner.escapes;
  sol.ascents = inner.ascents;
  sol.enumeration_truncated = inner.enumeration_truncated;
  for (auto& step : inner.trace.steps) {
    step.point = red.from_reduced(step.point);
    step.distance = std::sqrt((step.point - hull_target).squaredNorm() + offset2);
    step.active_rows = tight_rows(p, step.point);
    if (step.enumerated_subset) {
      for (Index& r : *step.enumerated_subset) r = red.row_map[static_cast<std::size_t>(r)];
    }
    sol.trace.steps.push_back(std::move(step));
  }
  sol.point = sol.trace.steps.back().point;
  sol.distance = (sol.point - target).norm();
  return sol;
}

/// Solve starting from the target-visible point on the segment [interior, target].
inline Solution solve_from_interior(const PolyhedronH& p, const Vector& target, const Vector& interior,
                                    const EnumeratorConfig& cfg = {}) {
  if (p.has_equalities()) return solve(p, target, interior, cfg);
  return solve(p, target, visible_point(p, interior, target), cfg);
}

}  // namespace polyproj
