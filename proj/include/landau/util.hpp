#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace landau {

/// Worker count for internal parallel loops: LANDAU_LAB_THREADS if set to a
/// positive integer, otherwise the hardware concurrency.
unsigned thread_count();

/// Run body(i) for i in [0, n) on up to thread_count() threads. Exceptions
/// thrown by the body are rethrown on the calling thread (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// 64-bit FNV-1a digest as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Round-trippable decimal rendering ("%.17g").
std::string format_double(double value);

}  // namespace landau
