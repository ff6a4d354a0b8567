#include "lossrj/cli/commands.hpp"

int main(int argc, char** argv) { return lossrj::cli::main_entry(argc, argv); }
