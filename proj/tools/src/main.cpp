#include <iostream>

#include "shexi_cli/cli.hpp"

int main(int argc, char ** argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return shexi::cli::run(args, std::cout, std::cerr);
}
