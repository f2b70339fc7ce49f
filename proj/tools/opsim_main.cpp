#include <iostream>

#include "opsim/cli.hpp"

int main(int argc, char** argv) {
  return opsim::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
