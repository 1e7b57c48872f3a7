#include "rwre/cli.hpp"

int main(int argc, char** argv)
{
    return rwre::cli_dispatch(argc, argv);
}
