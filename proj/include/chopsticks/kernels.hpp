#pragma once

namespace chopsticks {

// Execution policy for the data-parallel kernels. Both paths write each
// result to its own slot and reduce serially afterwards, so they produce
// bitwise-identical output.
enum class Exec { serial, parallel };

template <class F>
void for_each_index(Exec exec, int n, F&& f) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < n; ++i) f(i);
  } else {
    for (int i = 0; i < n; ++i) f(i);
  }
}

}  // namespace chopsticks
