#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cli.hpp"

int main(int argc, char** argv) {
#ifdef _OPENMP
  // Worker count only; results are identical for any value.
  if (const char* env = std::getenv("IDM_THREADS")) {
    const int threads = std::atoi(env);
    if (threads > 0) omp_set_num_threads(threads);
  }
#endif
  std::vector<std::string> args(argv + 1, argv + argc);
  return idm::cli::run(args, std::cout, std::cerr);
}
