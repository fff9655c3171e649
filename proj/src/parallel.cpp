#include <threeprimes/parallel.hpp>

#include <atomic>
#include <cstdlib>
#include <string>

namespace threeprimes {

namespace {

std::atomic<std::size_t> g_override{0};

} // namespace

std::size_t worker_count()
{
  if (const std::size_t n = g_override.load(); n > 0)
    return n;
  if (const char* env = std::getenv("THREEPRIMES_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0)
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void set_worker_count(std::size_t n)
{
  g_override.store(n);
}

} // namespace threeprimes
