#include <iostream>

#include "ggsd/cli.hpp"

int main(int argc, char** argv) { return ggsd::run_cli(argc, argv, std::cout, std::cerr); }
