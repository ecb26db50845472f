#include <iostream>

#include "cmix/cli.hpp"

int main(int argc, char** argv) { return cmix::run_cli(argc, argv, std::cout, std::cerr); }
