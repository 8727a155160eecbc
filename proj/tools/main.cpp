#include <iostream>

#include "rankrec/cli.hpp"

int main(int argc, char** argv) { return rankrec::cli::run(argc, argv, std::cout, std::cerr); }
