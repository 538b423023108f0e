// Apache License, Version 2.0, refer to LICENSE.txt

#include <string>
#include <vector>

#include "abhorizon/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return abh::run_cli(args);
}
