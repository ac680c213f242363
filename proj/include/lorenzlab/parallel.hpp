// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lorenzlab {

/// How ensemble kernels execute. `serial` is the reference path kept for
/// testing; both paths write results into per-member slots, so their outputs
/// are identical by construction.
enum class Exec { serial, parallel };

/// Worker count for the parallel path: LORENZLAB_WORKERS if set, otherwise
/// the OpenMP default.
int worker_count();

/// Overrides the worker count for subsequent parallel kernels (0 restores
/// the default).
void set_worker_count(int workers);

/// Calls fn(i) for i in [0, count). Exceptions thrown by fn are rethrown on
/// the calling thread (the first one, by member index).
template <class Fn>
void for_each_member(Exec exec, std::size_t count, Fn&& fn)
{
    if (exec == Exec::serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
    std::vector<std::exception_ptr> errors(count);
    const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (long long i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        }
        catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
#else
    for (std::size_t i = 0; i < count; ++i) fn(i);
#endif
}

/// Maps members to results, preserving member order.
template <class R, class Fn>
std::vector<R> map_members(Exec exec, std::size_t count, Fn&& fn)
{
    std::vector<R> out(count);
    for_each_member(exec, count, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

} // namespace lorenzlab
