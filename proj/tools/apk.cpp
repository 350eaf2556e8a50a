#include "apk/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return apk::run_cli(argc, argv, std::cout, std::cerr); }
