#include "dfo/cli.hpp"

int main(int argc, char** argv) { return dfo::cli::run(argc, argv); }
