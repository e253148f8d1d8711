#include "advgame/cli.hpp"

int main(int argc, char** argv) { return advgame::run_cli(argc, argv); }
