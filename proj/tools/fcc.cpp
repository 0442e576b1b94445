#include <iostream>

#include "fcc/cli.hpp"

int main(int argc, char** argv) { return fcc::cli::run(argc, argv, std::cout, std::cerr); }
