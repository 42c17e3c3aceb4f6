#include "diforge/cli.hpp"

int main(int argc, char** argv) { return diforge::run_cli(argc, argv); }
