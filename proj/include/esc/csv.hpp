#pragma once

// CSV writers for trajectories, field snapshots and average-system runs.

#include "esc/closed_loop.hpp"
#include "esc/format.hpp"

#include <ostream>

namespace esc {

inline void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec) {
    os << "t,theta,Theta,y,U,G_hat,H_hat,S,vartheta\n";
    for (const auto& s : rec.samples) {
        os << format_double(s.t) << ',' << format_double(s.theta) << ',' << format_double(s.Theta) << ','
           << format_double(s.y) << ',' << format_double(s.U) << ',' << format_double(s.G_hat) << ','
           << format_double(s.H_hat) << ',' << format_double(s.S) << ',' << format_double(s.vartheta) << '\n';
    }
}

inline void write_field_csv(std::ostream& os, const TrajectoryRecord& rec) {
    os << "t,x,alpha\n";
    for (const auto& snap : rec.snapshots) {
        const std::string t = format_double(snap.t);
        for (std::size_t i = 0; i < snap.alpha.size(); ++i) {
            os << t << ',' << format_double(rec.grid.x(i)) << ',' << format_double(snap.alpha[i]) << '\n';
        }
    }
}

inline void write_average_csv(std::ostream& os, const AverageRecord& rec) {
    os << "t,vartheta,u_norm,Omega,Z,U\n";
    for (const auto& s : rec.samples) {
        os << format_double(s.t) << ',' << format_double(s.vartheta) << ',' << format_double(s.u_norm) << ','
           << format_double(s.Omega) << ',' << format_double(s.Z) << ',' << format_double(s.U) << '\n';
    }
}

}  // namespace esc
