#include <iostream>
#include <string>
#include <vector>

#include "fracrenorm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fr::cli::run(args, std::cout, std::cerr);
}
