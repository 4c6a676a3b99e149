#include <iostream>

#include "hyperdyn/cli/commands.hpp"

int main(int argc, char** argv) { return hyperdyn::cli::run_cli(argc, argv, std::cout, std::cerr); }
