#include <iostream>
#include <string>
#include <vector>

#include "closure/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return closure::run_cli(args, std::cout, std::cerr);
}
