#pragma once

// Data-parallel kernels. Every parallel kernel has a serial reference with the same
// contract; reductions are deterministic (ties resolve to the smallest index), so the two
// always agree exactly.

#include <omp.h>

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace coxcheck::kernels {

enum class PointStatus { evaluated, zero_denominator, undefined };

template <class Value>
struct PointResult {
  PointStatus status = PointStatus::evaluated;
  Value residual{};
};

template <class Value>
struct GridReduction {
  Value max{};
  std::optional<std::size_t> argmax;
  std::size_t evaluated = 0;
  std::size_t zero_denominator = 0;
  std::size_t undefined = 0;

  void absorb(std::size_t index, const PointResult<Value>& r) {
    switch (r.status) {
      case PointStatus::zero_denominator: ++zero_denominator; return;
      case PointStatus::undefined: ++undefined; return;
      case PointStatus::evaluated: break;
    }
    ++evaluated;
    if (!argmax || r.residual > max || (r.residual == max && index < *argmax)) {
      max = r.residual;
      argmax = index;
    }
  }

  void merge(const GridReduction& other) {
    evaluated += other.evaluated;
    zero_denominator += other.zero_denominator;
    undefined += other.undefined;
    if (!other.argmax) return;
    if (!argmax || other.max > max || (other.max == max && *other.argmax < *argmax)) {
      max = other.max;
      argmax = other.argmax;
    }
  }
};

/// Max-residual reduction over flat indices [0, count).
template <class Value, class Eval>
GridReduction<Value> reduce_grid_serial(std::size_t count, Eval&& eval) {
  GridReduction<Value> acc;
  for (std::size_t i = 0; i < count; ++i) acc.absorb(i, eval(i));
  return acc;
}

/// Same result as reduce_grid_serial; `eval` must be safe to call concurrently.
template <class Value, class Eval>
GridReduction<Value> reduce_grid_parallel(std::size_t count, Eval&& eval) {
  GridReduction<Value> acc;
#pragma omp parallel
  {
    GridReduction<Value> local;
#pragma omp for schedule(dynamic, 64) nowait
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
      local.absorb(static_cast<std::size_t>(i), eval(static_cast<std::size_t>(i)));
#pragma omp critical(coxcheck_grid_merge)
    acc.merge(local);
  }
  return acc;
}

using Triple = std::array<long double, 3>;

struct Nearest {
  std::size_t index = std::numeric_limits<std::size_t>::max();
  long double distance = std::numeric_limits<long double>::infinity();
};

inline long double chebyshev(const Triple& a, const Triple& b) {
  long double d = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    long double e = a[k] > b[k] ? a[k] - b[k] : b[k] - a[k];
    if (e > d) d = e;
  }
  return d;
}

inline Nearest nearest_one(const Triple& target, std::span<const Triple> cloud) {
  Nearest best;
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    long double d = chebyshev(target, cloud[j]);
    if (d < best.distance) {
      best.distance = d;
      best.index = j;
      if (d == 0) break;
    }
  }
  return best;
}

/// For each target, the cloud point at the smallest Chebyshev distance (first on ties).
inline std::vector<Nearest> nearest_serial(std::span<const Triple> targets, std::span<const Triple> cloud) {
  std::vector<Nearest> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) out[i] = nearest_one(targets[i], cloud);
  return out;
}

inline std::vector<Nearest> nearest_parallel(std::span<const Triple> targets, std::span<const Triple> cloud) {
  std::vector<Nearest> out(targets.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(targets.size()); ++i)
    out[static_cast<std::size_t>(i)] = nearest_one(targets[static_cast<std::size_t>(i)], cloud);
  return out;
}

/// Cloud sorted by first coordinate so a query only scans points whose first coordinate is
/// within the best distance found so far. Answers match nearest_serial exactly.
class SortedCloud {
 public:
  explicit SortedCloud(std::span<const Triple> cloud) : cloud_(cloud.begin(), cloud.end()) {
    order_.resize(cloud_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return cloud_[a][0] < cloud_[b][0]; });
    keys_.resize(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) keys_[i] = cloud_[order_[i]][0];
  }

  Nearest query(const Triple& target) const {
    Nearest best;
    auto consider = [&](std::size_t pos) {
      std::size_t j = order_[pos];
      long double d = chebyshev(target, cloud_[j]);
      if (d < best.distance || (d == best.distance && j < best.index)) {
        best.distance = d;
        best.index = j;
      }
    };
    std::size_t mid = static_cast<std::size_t>(std::lower_bound(keys_.begin(), keys_.end(), target[0]) - keys_.begin());
    std::size_t up = mid, down = mid;
    while (up < keys_.size() || down > 0) {
      bool moved = false;
      if (up < keys_.size() && keys_[up] - target[0] <= best.distance) {
        consider(up++);
        moved = true;
      }
      if (down > 0 && target[0] - keys_[down - 1] <= best.distance) {
        consider(--down);
        moved = true;
      }
      if (!moved) break;
    }
    return best;
  }

 private:
  std::vector<Triple> cloud_;
  std::vector<std::size_t> order_;
  std::vector<long double> keys_;
};

inline std::vector<Nearest> nearest_sorted(std::span<const Triple> targets, const SortedCloud& cloud, bool parallel) {
  std::vector<Nearest> out(targets.size());
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(targets.size()); ++i)
    out[static_cast<std::size_t>(i)] = cloud.query(targets[static_cast<std::size_t>(i)]);
  return out;
}

/// Evaluates fn(i) for i in [0, count) and returns the results in index order.
template <class Result, class Fn>
std::vector<Result> map_serial(std::size_t count, Fn&& fn) {
  std::vector<Result> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
  return out;
}

template <class Result, class Fn>
std::vector<Result> map_parallel(std::size_t count, Fn&& fn) {
  std::vector<std::optional<Result>> slots(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
    slots[static_cast<std::size_t>(i)].emplace(fn(static_cast<std::size_t>(i)));
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace coxcheck::kernels
