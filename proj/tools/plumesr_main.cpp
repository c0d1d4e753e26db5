#include <iostream>

#include "plumesr/cli.hpp"

int main(int argc, char** argv) { return plumesr::cli::run(argc, argv, std::cout, std::cerr); }
