#include <iostream>

#include "qmerge/cli.hpp"

int main(int argc, char** argv) { return qmerge::cli::run_cli(argc, argv, std::cout, std::cerr); }
