#include <cstdio>

int main() {
    std::puts("scattering cli: not wired up yet");
    return 0;
}
