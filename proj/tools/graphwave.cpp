#include <iostream>

#include "graphwave/cli.hpp"

int main(int argc, char** argv) {
  return graphwave::cli::dispatch(argc, argv, std::cout, std::cerr);
}
