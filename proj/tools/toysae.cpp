#include "toysae/cli.hpp"

int main(int argc, char** argv) { return toysae::run_cli(argc, argv); }
