#include <iostream>
#include <string>
#include <vector>

#include "bbl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bbl::cli::run(args, std::cout, std::cerr);
}
