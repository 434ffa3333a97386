#include "glpin/cli/commands.hpp"

int main(int argc, char** argv) { return glpin::cli::run(argc, argv); }
