// Writes the scripted trajectory suite (12 clips + manifest.json) to a directory.

#include <iostream>

#include "falldet/synthetic.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <output-dir>\n";
        return 1;
    }
    const auto manifest = falldet::synth::write_suite(argv[1], falldet::synth::trajectory_suite());
    std::cout << manifest.string() << "\n";
    return 0;
}
