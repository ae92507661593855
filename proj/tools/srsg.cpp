#include "cli_app.hpp"

int main(int argc, char** argv) { return srsg::cli::run_cli(argc, argv); }
