#include <iostream>

#include "ssinit_tools/app.hpp"

int main(int argc, char** argv) { return ssinit::cli::main_cli(argc, argv, std::cout, std::cerr); }
