#include <string>
#include <vector>

#include "ventsim/cli.hpp"

int main(int argc, char** argv) {
  return ventsim::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
