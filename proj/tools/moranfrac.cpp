#include <iostream>

#include "moranfrac/cli.hpp"

int main(int argc, char** argv) { return moranfrac::cli::run(argc, argv, std::cout, std::cerr); }
