#include "adveig/cli.hpp"

int main(int argc, char** argv) { return adveig::run_command(argc, argv); }
