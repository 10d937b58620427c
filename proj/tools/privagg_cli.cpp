#include <iostream>

#include "privagg/cli/commands.hpp"

int main(int argc, char** argv) {
  return privagg::cli::run_cli(argc, argv, std::cout, std::cerr);
}
