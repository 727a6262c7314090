#include <iostream>

#include "censel/cli.hpp"

int main(int argc, char** argv) { return censel::run_cli(argc, argv, std::cout, std::cerr); }
