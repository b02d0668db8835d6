#pragma once

#include <optional>

#include "core/potential.hpp"
#include "core/vec.hpp"

namespace slg {

// C^2 piecewise-quintic map [0, t_final] -> O with linear endcaps
//   phi(s) = q0 + s p0           on [0, eps]
//   phi(s) = q1 + (s - t) p1     on [t - eps, t]
class ControlPath {
public:
    struct Segment {
        double s0 = 0.0, s1 = 1.0;
        Mat coef;  // dim x 6, tau-powers with tau = s - s0
    };

    ControlPath(std::vector<Segment> segments, double t_final, double epsilon, int dim)
        : segments_(std::move(segments)), t_final_(t_final), epsilon_(epsilon), dim_(dim) {}

    void eval(double s, std::span<double> phi, std::span<double> dphi,
              std::span<double> ddphi) const;

    double t_final() const { return t_final_; }
    double epsilon() const { return epsilon_; }
    int dim() const { return dim_; }
    const std::vector<Segment>& segments() const { return segments_; }

private:
    std::vector<Segment> segments_;
    double t_final_, epsilon_;
    int dim_;
};

struct BuildOptions {
    int grid_points = 2000;   // in-domain validation resolution
    int corridor_retries = 50;
    std::uint64_t seed = 11;
};

// Quintic spline through user waypoints or an automatic corridor; throws
// PathError when no in-domain path is found.
ControlPath build_path(const PotentialModel& model, const PhaseState& x0, const PhaseState& x1,
                       double t, const std::vector<Vec>& waypoints = {},
                       const BuildOptions& opts = {});

// xi(s) = (phi'' + gamma phi' + grad U(phi)) / sqrt(2 gamma T)
Vec control_at(const PotentialModel& model, const ControlPath& path, double gamma,
               double temperature, double s);

struct ControlSamples {
    Vec s_grid;
    Mat phi;  // n x dim
    Mat xi;   // n x dim
    double cost = 0.0;  // integral of |xi|^2 ds (trapezoid on the grid)
};

ControlSamples synthesize_control(const PotentialModel& model, const ControlPath& path,
                                  double gamma, double temperature, int n_grid = 1025);

struct ReachReport {
    double endpoint_error = 0.0;
    double tolerance = 0.0;
    double max_u = 0.0;          // largest U along the re-integrated trajectory
    double max_path_dev = 0.0;   // max |Q(s) - phi(s)| at accepted steps
    double cost = 0.0;
    long long ode_accepted = 0;
    long long ode_rejected = 0;
    bool pass = false;
    Vec q_end, p_end;
};

// Re-integrates the controlled ODE with the synthesized xi and reports the
// endpoint error against x1.
ReachReport verify_reachability(const PotentialModel& model, const PhaseState& x0,
                                const PhaseState& x1, double t, double gamma, double temperature,
                                const std::vector<Vec>& waypoints = {},
                                const BuildOptions& opts = {});

}  // namespace slg
