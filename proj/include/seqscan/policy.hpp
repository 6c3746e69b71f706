#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "seqscan/index.hpp"

namespace seqscan {

// Process ids are 0-based throughout the library.
using ProcessId = std::size_t;

inline constexpr double kNoExploration = std::numeric_limits<double>::infinity();

/// Round-robin instants ceil(zeta^l), l >= 1, with duplicates removed.
/// Materialised lazily; monotone queries are answered through a cursor.
class ExplorationSchedule {
 public:
  /// zeta must be > 1; kNoExploration disables the schedule.
  explicit ExplorationSchedule(double zeta);

  bool contains(std::int64_t n);
  double zeta() const { return zeta_; }
  bool enabled() const { return zeta_ != kNoExploration; }

  /// Instants <= n, in increasing order.
  std::vector<std::int64_t> instants_upto(std::int64_t n);

 private:
  void extend_to(std::int64_t n);

  double zeta_;
  int next_exponent_ = 1;
  bool exhausted_ = false;
  std::vector<std::int64_t> instants_;
  std::size_t cursor_ = 0;
};

bool is_exploration_instant(ExplorationSchedule& sched, std::int64_t n);

/// K(n), the round-robin cursor and the probe budget.
struct PolicyState {
  std::vector<bool> active;
  std::size_t active_count = 0;
  ProcessId rr_cursor = 0;  // last round-robin pick
  std::size_t m = 1;

  /// All processes active; the cursor starts at the last id so that the
  /// first round-robin instant picks process 0 (and 0..M-1 for M > 1).
  static PolicyState initial(std::size_t k, std::size_t m);

  void deactivate(ProcessId id);
  bool is_active(ProcessId id) const { return active[id]; }
  std::size_t size() const { return active.size(); }
};

/// Wrapped successor of the cursor that is still active. Updates the cursor.
ProcessId round_robin_next(PolicyState& state, std::size_t k);

/// Up to M distinct active ids by successive wrapped successors. Returns
/// every active id when fewer than M remain. The cursor ends on the last pick.
std::vector<ProcessId> round_robin_next_multi(PolicyState& state, std::size_t k, std::size_t m);

/// min(M, |active|) active ids of highest index, ties to the lowest id,
/// ordered by decreasing index.
std::vector<ProcessId> top_m_active(std::span<const IndexValue> indices, const PolicyState& state);

/// Closed-loop selection: top-M by index, or round-robin at exploration
/// instants. Returns an empty set once nothing is active.
std::vector<ProcessId> select_cl(std::span<const IndexValue> indices, PolicyState& state, std::int64_t n,
                                 ExplorationSchedule& sched);

/// Permutation sorting prior * cost / expected_size in decreasing order,
/// ties to the lowest id.
std::vector<ProcessId> ol_order(std::span<const double> priors, std::span<const double> costs,
                                std::span<const double> expected_sizes);

/// Open-loop execution: each of the M slots probes its process until it is
/// declared, then takes the next unstarted process in the fixed order.
class OpenLoopPlan {
 public:
  OpenLoopPlan(std::vector<ProcessId> order, std::size_t m);

  std::vector<ProcessId> select(const PolicyState& state);

 private:
  std::vector<ProcessId> order_;
  std::size_t next_ = 0;
  std::vector<ProcessId> slots_;
  std::size_t m_;
};

}  // namespace seqscan
