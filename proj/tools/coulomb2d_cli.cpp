#include <string>
#include <vector>

#include "coulomb2d/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return c2d::cli::run(args);
}
