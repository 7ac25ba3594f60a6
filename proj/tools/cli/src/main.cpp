#include <iostream>
#include <string>
#include <vector>

#include "folsing/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return folsing::cli::run(args, std::cout, std::cerr);
}
