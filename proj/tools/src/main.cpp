#include "stlfunnel_cli/commands.hpp"

int main(int argc, char** argv) { return stlfunnel::cli::main(argc, argv); }
