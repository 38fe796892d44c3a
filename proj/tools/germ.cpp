#include <iostream>

#include "germ/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return germ::run_cli(args, std::cout, std::cerr);
}
