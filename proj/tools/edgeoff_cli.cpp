#include <vector>

#include "edgeoff/cli.hpp"

int main(int argc, char** argv) {
  return edgeoff::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
