// Dither constants for a few settings and the integral check over one period.

#include "esc/dither.hpp"

#include <iostream>

int main() {
    for (const esc::DitherParams p : {esc::DitherParams{0.2, 10.0, 1.0}, esc::DitherParams{0.2, 25.0, 1.0}}) {
        for (auto f : {esc::DitherFormula::consistent, esc::DitherFormula::published}) {
            const auto d = esc::design_dither(p, f);
            const auto ts = esc::one_period_samples(p, 200);
            const auto rep = esc::verify_integral_identity(d, ts, 1e-6);
            std::cout << "a=" << p.amplitude << " omega=" << p.omega << " L=" << p.length << " " << esc::to_string(f)
                      << ": A=" << d.A << " phi=" << d.phi << " max|int beta - a sin wt|=" << rep.max_residual << '\n';
        }
    }
}
