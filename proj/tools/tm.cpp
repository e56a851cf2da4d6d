#include <iostream>
#include <string>
#include <vector>

#include "thinging/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return thinging::run(args, std::cout, std::cerr);
}
