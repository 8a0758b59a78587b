#include "afcsim/cli_app.hpp"

int main(int argc, char** argv) { return afcsim::run_cli(argc, argv); }
