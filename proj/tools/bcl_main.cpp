#include <iostream>
#include <string>
#include <vector>

#include "bcl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bcl::cli::run(args, std::cout, std::cerr);
}
