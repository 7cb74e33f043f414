#pragma once

namespace thermonet {

/// Two-block split of a flat parameter vector: block 1 is [0, first),
/// block 2 is [first, total). For the single-hidden-layer network block 1
/// holds the input-layer weights and biases, block 2 the output layer's.
struct Partition {
    int first = 0;
    int total = 0;
    int second() const { return total - first; }
};

} // namespace thermonet
