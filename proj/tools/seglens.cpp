#include "cli.hpp"

int main(int argc, char** argv) { return seglens::cli::run(argc, argv); }
