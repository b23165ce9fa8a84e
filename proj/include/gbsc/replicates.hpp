#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gbsc {

// How independent replicates are scheduled. Serial is the reference path;
// Parallel distributes replicates over OpenMP threads. Each replicate owns
// its model and random stream and writes only its own result slot, so both
// paths produce bitwise-identical results.
enum class Execution { Serial, Parallel };

int available_threads() noexcept;

// Calls body(i) for every i in [0, count). Under Parallel the first
// exception thrown by any body is rethrown on the calling thread after all
// iterations finish.
template <typename Body>
void for_each_replicate(std::size_t count, Execution execution, Body&& body) {
  if (execution == Execution::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
#else
  for (std::size_t i = 0; i < count; ++i) body(i);
#endif
}

}  // namespace gbsc
