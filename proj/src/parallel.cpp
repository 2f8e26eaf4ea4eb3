#include <stripwall/parallel.hpp>

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stripwall {

namespace {
int g_cap = 0;
}

double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t block = 16;
  if (v.size() <= block) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

void set_thread_cap(int threads) {
  g_cap = threads > 0 ? threads : 0;
#ifdef _OPENMP
  if (g_cap > 0) omp_set_num_threads(g_cap);
#endif
}

void apply_thread_cap_from_env() {
  if (const char* s = std::getenv("WALL_THREADS")) {
    try {
      set_thread_cap(std::stoi(s));
    } catch (const std::exception&) {
      // ignored: malformed values leave the default in place
    }
  }
}

int thread_cap() {
#ifdef _OPENMP
  return g_cap > 0 ? g_cap : omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace stripwall
