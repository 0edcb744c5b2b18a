#include <iostream>

#include "toa/cli.hpp"

int main(int argc, char** argv) { return toa::cli::run(argc, argv, std::cout, std::cerr); }
