#include "subsector/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return subsector::run_cli(argc, argv, std::cout, std::cerr);
}
