#include "interact/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return interact::cli::dispatch(argc, argv, std::cout, std::cerr); }
