#include <iostream>

#include "perflab/cli.hpp"

int main(int argc, char** argv) {
  return perflab::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
