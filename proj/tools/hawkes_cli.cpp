#include <string>
#include <vector>

#include "hawkes/cli.hpp"

int main(int argc, char** argv) {
  return hawkes::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
