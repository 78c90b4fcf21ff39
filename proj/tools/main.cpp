// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include <iostream>
#include <string>
#include <vector>

#include "names/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return names::cli::run(args, std::cout, std::cerr);
}
