#include "slip/cli.hpp"

int main(int argc, char** argv) { return slip::run_cli(argc, argv); }
