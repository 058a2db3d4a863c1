// SPDX-License-Identifier: Apache-2.0
//
// Execution policy for the data-parallel particle kernels. Every kernel does
// identical per-element arithmetic under both policies and reduces in a fixed
// order, so Serial and Parallel produce bit-identical results; Serial is the
// reference implementation the tests compare against.

#pragma once

#include <cstddef>

namespace rislam {

enum class Execution { Serial, Parallel };

template <typename F>
void parallel_for(std::size_t n, Execution exec, F&& body) {
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace rislam
