#include <iostream>

#include "cantor/cli.hpp"

int main(int argc, char** argv) { return cantor::cli::main_entry(argc, argv, std::cout, std::cerr); }
