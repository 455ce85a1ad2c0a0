#include "modpoly/parallel.hpp"

#include <mpfr.h>

#include <cstdlib>
#include <string>

namespace modpoly {

namespace {

std::atomic<unsigned> g_override{0};

unsigned default_thread_count() {
  if (const char* env = std::getenv("MODPOLY_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace

unsigned thread_count() {
  const unsigned o = g_override.load();
  return o != 0 ? o : default_thread_count();
}

void set_thread_count(unsigned count) { g_override.store(count); }

void release_thread_caches() { mpfr_free_cache2(MPFR_FREE_LOCAL_CACHE); }

}  // namespace modpoly
