#include <iostream>

#include "hports/cli.hpp"

int main(int argc, char** argv) {
  return hports::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
