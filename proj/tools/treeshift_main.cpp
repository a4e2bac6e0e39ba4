#include <iostream>
#include <vector>

#include <treeshift/cli.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return treeshift::cli::run(std::move(args), std::cout, std::cerr);
}
