#include "relaxfv/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return relaxfv::run_cli(argc, argv, std::cout, std::cerr); }
