#include "rndiff/cli/commands.hpp"

int main(int argc, char** argv) { return rndiff::cli::run(argc, argv); }
