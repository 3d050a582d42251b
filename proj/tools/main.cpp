#include <iostream>
#include <string>
#include <vector>

#include "flmc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return flmc::dispatch(args, std::cout, std::cerr);
}
