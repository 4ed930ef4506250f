#include <iostream>

#include "qprobe_cli/cli.hpp"

int main(int argc, char** argv) { return qprobe::cli::run_cli(argc, argv, std::cout, std::cerr); }
