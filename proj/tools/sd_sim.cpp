#include "sdsim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sdsim::cli::run_cli(argc, argv, std::cout, std::cerr); }
