#include <iostream>

#include "geotag/cli.h"

int main(int argc, char** argv) {
  return geotag::run_cli(argc, argv, std::cout, std::cerr);
}
