#include "esc/cli.hpp"

int main(int argc, char** argv) { return esc::cli::main_entry(argc, argv); }
