#include <iostream>

#include "glmg/cli.hpp"

int main(int argc, char** argv) { return glmg::cli::run(argc, argv, std::cout, std::cerr); }
