#include <iostream>

#include "dchain/cli.hpp"

int main(int argc, char** argv) { return dchain::cli::run_command(argc, argv, std::cout, std::cerr); }
