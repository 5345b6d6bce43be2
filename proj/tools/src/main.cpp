#include <iostream>
#include <string>
#include <vector>

#include "ekrylov_cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ekrylov::cli::run(args, std::cout, std::cerr);
}
