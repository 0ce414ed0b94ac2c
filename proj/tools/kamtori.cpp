#include "kamtori/cli.hpp"

int main(int argc, char** argv) { return kamtori::dispatch(argc, argv); }
