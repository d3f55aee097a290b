#include <cstdio>

int main() {
  std::puts("hke: placeholder");
  return 0;
}
