#include "commands.hpp"

int main(int argc, char** argv) { return panogeo::run_cli(argc, argv); }
