#include <iostream>
#include <string>
#include <vector>

#include "tempora/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tempora::cli_dispatch(args, std::cout, std::cerr);
}
