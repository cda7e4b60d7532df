#include "varwidth/cli.hpp"

int main(int argc, char** argv) { return varwidth::run_cli(argc, argv); }
