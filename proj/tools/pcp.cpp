#include <iostream>
#include <string>
#include <vector>

#include "pcp/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pcp::run_cli(args, std::cout, std::cerr);
}
