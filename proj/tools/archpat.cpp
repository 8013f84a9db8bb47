#include <iostream>
#include <string>
#include <vector>

#include "archpat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return archpat::cli::run(args, std::cout, std::cerr, archpat::cli::environment_from_process());
}
