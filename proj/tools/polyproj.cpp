#include <iostream>

#include "polyproj/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return polyproj::cli::run(args, std::cout, std::cerr);
}
