#pragma once

#include "gravphase/errors.hpp"

namespace gravphase {

// Fixed CODATA-2018 values, shipped in one place so repeated runs are
// bit-reproducible across machines. A scenario config may override any of
// them; every computation downstream reads the same loaded set.
struct Constants {
    double G = 6.67430e-11;              // m^3 kg^-1 s^-2
    double hbar = 1.054571817e-34;       // J s
    double eps0 = 8.8541878128e-12;      // F m^-1
    double m_rb87 = 1.44316060e-25;      // kg
    double lambda_laser = 780.241209686e-9;  // m, Rb-87 D2 beamsplitter line

    void validate() const {
        if (!(G > 0.0)) throw ValidationError("constants: G must be positive");
        if (!(hbar > 0.0)) throw ValidationError("constants: hbar must be positive");
        if (!(eps0 > 0.0)) throw ValidationError("constants: eps0 must be positive");
        if (!(m_rb87 > 0.0)) throw ValidationError("constants: m_rb87 must be positive");
        if (!(lambda_laser > 0.0))
            throw ValidationError("constants: lambda_laser must be positive");
    }
};

}  // namespace gravphase
