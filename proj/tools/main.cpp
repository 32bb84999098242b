#include "bregmanot/cli.hpp"

int main(int argc, char** argv) { return bregmanot::run_cli(argc, argv); }
