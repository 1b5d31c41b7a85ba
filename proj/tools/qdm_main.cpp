#include <iostream>

#include "qdm/cli.hpp"

int main(int argc, char **argv) { return qdm::cli::run(argc, argv, std::cout, std::cerr); }
