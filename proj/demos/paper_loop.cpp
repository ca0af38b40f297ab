// Runs the numerical-experiment loop and prints a coarse trace of y and Theta.

#include "esc/analysis.hpp"
#include "esc/closed_loop.hpp"

#include <iomanip>
#include <iostream>

int main() {
    const auto cfg = esc::ScenarioConfig::paper();
    const auto rec = esc::run_esc(cfg);
    std::cout << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < rec.samples.size(); i += 500) {
        const auto& s = rec.samples[i];
        std::cout << "t=" << std::setw(6) << s.t << "  y=" << s.y << "  Theta=" << s.Theta << "  theta=" << s.theta << '\n';
    }
    const auto st = esc::late_time_stats(rec, cfg.map, 20.0);
    std::cout << "last 20 s: mean|y-5|=" << st.mean_abs_y_error << "  mean|Theta-2|=" << st.mean_abs_Theta_error << '\n';
}
