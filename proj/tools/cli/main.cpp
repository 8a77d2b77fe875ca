#include <iostream>

#include "sag_cli.hpp"

int main(int argc, char** argv) {
  return sag::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
