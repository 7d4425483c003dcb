#include "drfed/cli.hpp"

int main(int argc, char** argv) { return drfed::run_cli(argc, argv); }
