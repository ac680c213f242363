// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace lorenzlab {

namespace {

std::atomic<int> g_override{0};

int env_workers()
{
    const char* env = std::getenv("LORENZLAB_WORKERS");
    if (!env) return 0;
    try {
        const int n = std::stoi(env);
        return n > 0 ? n : 0;
    }
    catch (...) {
        return 0;
    }
}

} // namespace

int worker_count()
{
    if (const int o = g_override.load(); o > 0) return o;
    if (const int e = env_workers(); e > 0) return e;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_worker_count(int workers) { g_override.store(workers > 0 ? workers : 0); }

} // namespace lorenzlab
