#include "nashcont/cli.hpp"

int main(int argc, char** argv) { return nashcont::cli_main(argc, argv); }
