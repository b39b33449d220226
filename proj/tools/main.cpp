#include "drlsim/cli_commands.hpp"

int main(int argc, char** argv) { return drlsim::cli::run(argc, argv); }
