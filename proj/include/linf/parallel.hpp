#pragma once

#include <cstddef>
#include <functional>

namespace linf {

/// Worker count used by parallel_for. Defaults to the LINF_THREADS
/// environment variable, else std::thread::hardware_concurrency().
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Each index is visited exactly once;
/// bodies must only write state owned by their index. Calls made from
/// inside a body run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace linf
