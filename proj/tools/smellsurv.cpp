#include <iostream>

#include "smellsurv/cli.hpp"

int main(int argc, char** argv) {
  return smellsurv::cli::main(argc, argv, std::cout, std::cerr);
}
