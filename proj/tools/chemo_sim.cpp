#include "chemo/cli.hpp"

int main(int argc, char** argv) { return chemo::cli_main(argc, argv); }
