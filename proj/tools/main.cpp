#include "cli.hpp"

int main(int argc, char** argv) { return jafit::cli::main(argc, argv); }
