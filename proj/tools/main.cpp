#include <vector>

#include "slowfast/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return slowfast::dispatch(std::move(args));
}
