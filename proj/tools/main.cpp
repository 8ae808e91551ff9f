#include <iostream>

#include "cptquit/cli.hpp"

int main(int argc, char** argv) { return cptquit::cli::run(argc, argv, std::cout, std::cerr); }
