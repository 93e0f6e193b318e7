#include <iostream>
#include <string>
#include <vector>

#include "npdt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return npdt::cli::run(args, std::cout, std::cerr).exit_code;
}
