#include <iostream>
#include <string>
#include <vector>

#include "temperlab/catalog_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return temperlab::catalog_cli::run_command(args, std::cout, std::cerr);
}
