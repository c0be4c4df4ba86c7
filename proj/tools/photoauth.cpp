#include <iostream>
#include <string>
#include <vector>

#include "photoauth/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return photoauth::cli::run(args, std::cin, std::cout, std::cerr);
}
