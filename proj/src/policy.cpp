#include "seqscan/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace seqscan {

namespace {
constexpr std::int64_t kInstantCeiling = std::int64_t{1} << 53;
}

ExplorationSchedule::ExplorationSchedule(double zeta) : zeta_(zeta) {
  if (!(zeta > 1.0)) throw std::invalid_argument("exploration parameter zeta must be > 1");
  exhausted_ = !enabled();
}

void ExplorationSchedule::extend_to(std::int64_t n) {
  while (!exhausted_ && (instants_.empty() || instants_.back() < n)) {
    const double v = std::ceil(std::pow(zeta_, next_exponent_));
    ++next_exponent_;
    if (!(v < static_cast<double>(kInstantCeiling))) {
      exhausted_ = true;
      break;
    }
    const auto instant = static_cast<std::int64_t>(v);
    if (instants_.empty() || instant > instants_.back()) instants_.push_back(instant);
  }
}

bool ExplorationSchedule::contains(std::int64_t n) {
  if (!enabled()) return false;
  extend_to(n);
  if (cursor_ > 0 && instants_[cursor_ - 1] >= n) {
    return std::binary_search(instants_.begin(), instants_.end(), n);
  }
  while (cursor_ < instants_.size() && instants_[cursor_] < n) ++cursor_;
  return cursor_ < instants_.size() && instants_[cursor_] == n;
}

std::vector<std::int64_t> ExplorationSchedule::instants_upto(std::int64_t n) {
  if (!enabled()) return {};
  extend_to(n);
  auto end = std::upper_bound(instants_.begin(), instants_.end(), n);
  return {instants_.begin(), end};
}

bool is_exploration_instant(ExplorationSchedule& sched, std::int64_t n) { return sched.contains(n); }

PolicyState PolicyState::initial(std::size_t k, std::size_t m) {
  if (k == 0) throw std::invalid_argument("need at least one process");
  if (m == 0 || m > k) throw std::invalid_argument("probe budget M must satisfy 1 <= M <= K");
  PolicyState s;
  s.active.assign(k, true);
  s.active_count = k;
  s.rr_cursor = k - 1;
  s.m = m;
  return s;
}

void PolicyState::deactivate(ProcessId id) {
  if (active[id]) {
    active[id] = false;
    --active_count;
  }
}

ProcessId round_robin_next(PolicyState& state, std::size_t k) {
  for (std::size_t u = 0; u < k; ++u) {
    const ProcessId candidate = (state.rr_cursor + 1 + u) % k;
    if (state.active[candidate]) {
      state.rr_cursor = candidate;
      return candidate;
    }
  }
  throw std::logic_error("round robin on an empty active set");
}

std::vector<ProcessId> round_robin_next_multi(PolicyState& state, std::size_t k, std::size_t m) {
  std::vector<ProcessId> picks;
  const std::size_t want = std::min(m, state.active_count);
  picks.reserve(want);
  ProcessId prev = state.rr_cursor;
  while (picks.size() < want) {
    for (std::size_t u = 0; u < k; ++u) {
      const ProcessId candidate = (prev + 1 + u) % k;
      if (state.active[candidate] && std::find(picks.begin(), picks.end(), candidate) == picks.end()) {
        picks.push_back(candidate);
        prev = candidate;
        break;
      }
    }
  }
  if (!picks.empty()) state.rr_cursor = picks.back();
  return picks;
}

std::vector<ProcessId> top_m_active(std::span<const IndexValue> indices, const PolicyState& state) {
  std::vector<ProcessId> ids;
  ids.reserve(state.active_count);
  for (ProcessId k = 0; k < state.size(); ++k) {
    if (state.active[k]) ids.push_back(k);
  }
  const std::size_t take = std::min(state.m, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(),
                    [&](ProcessId a, ProcessId b) {
                      if (indices[a].value != indices[b].value) return indices[a].value > indices[b].value;
                      return a < b;
                    });
  ids.resize(take);
  return ids;
}

std::vector<ProcessId> select_cl(std::span<const IndexValue> indices, PolicyState& state, std::int64_t n,
                                 ExplorationSchedule& sched) {
  if (state.active_count == 0) return {};
  if (sched.contains(n)) {
    if (state.m == 1) return {round_robin_next(state, state.size())};
    return round_robin_next_multi(state, state.size(), state.m);
  }
  return top_m_active(indices, state);
}

std::vector<ProcessId> ol_order(std::span<const double> priors, std::span<const double> costs,
                                std::span<const double> expected_sizes) {
  const std::size_t k = priors.size();
  if (costs.size() != k || expected_sizes.size() != k) throw std::invalid_argument("ol_order: size mismatch");
  std::vector<double> ratio(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(expected_sizes[i] > 0.0)) throw std::invalid_argument("ol_order: expected sizes must be positive");
    ratio[i] = priors[i] * costs[i] / expected_sizes[i];
  }
  std::vector<ProcessId> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ProcessId a, ProcessId b) { return ratio[a] > ratio[b]; });
  return order;
}

OpenLoopPlan::OpenLoopPlan(std::vector<ProcessId> order, std::size_t m) : order_(std::move(order)), m_(m) {
  if (m_ == 0) throw std::invalid_argument("probe budget must be positive");
}

std::vector<ProcessId> OpenLoopPlan::select(const PolicyState& state) {
  std::erase_if(slots_, [&](ProcessId id) { return !state.active[id]; });
  while (slots_.size() < m_ && next_ < order_.size()) {
    const ProcessId id = order_[next_++];
    if (state.active[id]) slots_.push_back(id);
  }
  return slots_;
}

}  // namespace seqscan
