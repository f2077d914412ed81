#include <iostream>

#include "arc_cli/commands.hpp"

int main(int argc, char** argv) { return arc::cli::dispatch(argc, argv, std::cout, std::cerr); }
