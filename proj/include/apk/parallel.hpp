#pragma once

#include <cstddef>
#include <functional>

namespace apk {

/// Worker count used by parallel_for; defaults to APK_THREADS or 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs fn(i) for i in [0, n). Each index is handled exactly once; callers
/// write to per-index slots and reduce afterwards, so results never depend
/// on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace apk
