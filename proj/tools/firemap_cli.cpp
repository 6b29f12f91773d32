#include <string>
#include <vector>

#include "firemap/cli.hpp"

int main(int argc, char** argv) {
  return firemap::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
