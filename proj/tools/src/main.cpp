#include <iostream>

#include "csbm_cli/cli.hpp"

int main(int argc, char** argv) { return csbm::cli::cli_main(argc, argv, std::cout, std::cerr); }
