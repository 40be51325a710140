#include "splp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return splp::run_cli(argc, argv, std::cout, std::cerr); }
