#include <iostream>

#include "gbsc/cli.hpp"

int main(int argc, char** argv) { return gbsc::cli::run(argc, argv, std::cout, std::cerr); }
