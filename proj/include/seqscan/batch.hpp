#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqscan/engine.hpp"

namespace seqscan {

/// Episodes [first, first + count) of a batch. Episode i always runs on
/// RandomStream(master_seed, i), so both kernels below return identical
/// vectors for the same arguments.
struct BatchRange {
  std::uint64_t master_seed = 0;
  std::uint64_t first = 0;
  std::uint64_t count = 0;
};

/// Reference kernel: episodes one after another.
std::vector<EpisodeResult> run_batch_serial(std::span<const ProcessSpec> specs, const PolicyConfig& policy,
                                            const BatchRange& range);

/// OpenMP kernel over episodes. The first failing episode (lowest index)
/// is rethrown after the loop.
std::vector<EpisodeResult> run_batch_parallel(std::span<const ProcessSpec> specs, const PolicyConfig& policy,
                                              const BatchRange& range);

/// Threads the parallel kernel will use (1 without OpenMP).
int batch_threads();

}  // namespace seqscan
