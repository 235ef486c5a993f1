#pragma once

namespace gmv {

// A (mean, variance) pair.  Used both for utility moments (E[U], Var[U]) and
// for return/log-wealth distributions.
struct MomentPair {
    double mean = 0.0;
    double var = 0.0;
};

}  // namespace gmv
