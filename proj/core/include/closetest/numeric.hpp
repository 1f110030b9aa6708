#pragma once

namespace closetest {

// Kahan-compensated accumulator.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double value) {
        double y = value - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

}  // namespace closetest
