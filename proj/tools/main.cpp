#include <iostream>

#include "eml/cli.hpp"

int main(int argc, char** argv) { return eml::cli::run(argc, argv, std::cout, std::cerr); }
