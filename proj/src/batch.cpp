#include "seqscan/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seqscan {

std::vector<EpisodeResult> run_batch_serial(std::span<const ProcessSpec> specs, const PolicyConfig& policy,
                                            const BatchRange& range) {
  std::vector<EpisodeResult> out;
  out.reserve(range.count);
  for (std::uint64_t i = 0; i < range.count; ++i) {
    RandomStream rng(range.master_seed, range.first + i);
    out.push_back(run_episode(specs, policy, rng));
  }
  return out;
}

std::vector<EpisodeResult> run_batch_parallel(std::span<const ProcessSpec> specs, const PolicyConfig& policy,
                                              const BatchRange& range) {
  const auto count = static_cast<std::int64_t>(range.count);
  std::vector<EpisodeResult> out(range.count);
  std::vector<std::exception_ptr> errors(range.count);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      RandomStream rng(range.master_seed, range.first + static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = run_episode(specs, policy, rng);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

int batch_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace seqscan
