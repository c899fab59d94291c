#include "cli_app.hpp"

int main(int argc, char** argv) { return texture::cli::run(argc, argv); }
