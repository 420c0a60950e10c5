#include <iostream>
#include <string>
#include <vector>

#include "ubar/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ubar::cli::main(args, std::cin, std::cout, std::cerr);
}
