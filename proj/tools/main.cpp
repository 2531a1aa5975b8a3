#include "npm/cli/commands.hpp"

int main(int argc, char** argv) { return npm::cli::run_main(argc, argv); }
