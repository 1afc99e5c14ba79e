#include <iostream>

#include "ppz/cli.hpp"

int main(int argc, char** argv) {
  return ppz::run_cli(argc, argv, std::cout, std::cerr);
}
