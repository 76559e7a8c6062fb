#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return thermosense::cli::run(argc, argv, std::cout, std::cerr); }
