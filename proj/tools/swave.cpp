#include <iostream>

#include "swave/cli.hpp"

int main(int argc, char** argv) { return swave::run_cli(argc, argv, std::cout, std::cerr); }
