#include <iostream>

#include "dam/cli/commands.hpp"

int main(int argc, char** argv) { return dam::cli::run(argc, argv, std::cout, std::cerr); }
