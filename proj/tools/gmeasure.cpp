#include <iostream>

#include "gmeasure/cli.hpp"

int main(int argc, char** argv) { return gmeasure::cli::run(argc, argv, std::cout, std::cerr); }
