#include <iostream>

#include "ns1d/cli.hpp"

int main(int argc, char** argv) {
  return ns1d::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
