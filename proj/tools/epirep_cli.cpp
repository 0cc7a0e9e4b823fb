#include "epirep/runner.hpp"

#include <iostream>

int main(int argc, char** argv) { return epirep::cli_main(argc, argv, std::cout, std::cerr); }
