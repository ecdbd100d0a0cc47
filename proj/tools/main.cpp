#include <iostream>

#include "mpsehmm/cli.hpp"

int main(int argc, char** argv) { return mpsehmm::cli::run(argc, argv, std::cout, std::cerr); }
