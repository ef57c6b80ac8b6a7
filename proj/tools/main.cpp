#include "gramcent/expharness.hpp"

int main(int argc, char** argv) {
    return gramcent::cli_main(argc, argv);
}
