#include "pgr/cli/cli.hpp"

int main(int argc, char** argv) { return pgr::run_command(argc, argv); }
