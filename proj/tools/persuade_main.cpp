#include "persuade/cli.hpp"

int main(int argc, char** argv) { return persuade::cli::main(argc, argv); }
