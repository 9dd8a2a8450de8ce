#include <iostream>

#include "mtclt/cli.hpp"

int main(int argc, char** argv) { return mtclt::cli::run(argc, argv, std::cout, std::cerr); }
