#include <iostream>

#include "sheafmach_cli/cli.hpp"

int main(int argc, char** argv) { return sheafmach::cli::main_entry(argc, argv, std::cout, std::cerr); }
