#include <iostream>
#include <string>
#include <vector>

#include "probinc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return probinc::cli::run(args, std::cout, std::cerr);
}
