#include "tiltgest/cli.hpp"

int main(int argc, char** argv) { return tiltgest::cli::cli_main(argc, argv); }
