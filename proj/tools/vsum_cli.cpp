#include "vsum/cli.hpp"

int main(int argc, char** argv) { return vsum::cli::main_entry(argc, argv); }
