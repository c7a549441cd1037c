#include "octa/parallel.hpp"

#include <atomic>

namespace octa {

namespace {
std::atomic<int> g_jobs{1};
}

int jobs() { return g_jobs.load(); }
void set_jobs(int n) { g_jobs.store(n < 1 ? 1 : n); }

}  // namespace octa
