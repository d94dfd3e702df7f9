#include <iostream>
#include <vector>

#include "nsfem/cli.hpp"

int main(int argc, char** argv) {
  return nsfem::run_cli(std::vector<std::string>(argv + 1, argv + argc),
                        std::cout, std::cerr);
}
