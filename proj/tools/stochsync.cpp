#include <iostream>

#include "stochsync/commands.hpp"

int main(int argc, char** argv) { return stochsync::run_cli(argc, argv, std::cout, std::cerr); }
