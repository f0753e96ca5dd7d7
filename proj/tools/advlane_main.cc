#include <iostream>

#include "advlane/cli.h"

int main(int argc, char** argv) {
  return advlane::RunCli(argc, argv, std::cout, std::cerr);
}
