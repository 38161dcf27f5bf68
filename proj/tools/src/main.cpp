#include <iostream>

#include "eqalloc/cli.hpp"

int main(int argc, char** argv) { return eqalloc::cli::run_cli(argc, argv, std::cout, std::cerr); }
