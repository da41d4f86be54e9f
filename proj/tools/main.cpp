#include "cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return freespec::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
