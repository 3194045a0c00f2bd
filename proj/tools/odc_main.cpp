#include <iostream>
#include <string>
#include <vector>

#include "odc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return odc::cli::run(args, std::cout, std::cerr);
}
