#pragma once

namespace mehler {

// Centered Gaussian density on the line with variance s.
double kernel_g1(double s, double x);
// Product kernel on the plane.
double kernel_g2(double s, double x0, double x1);
// s-derivative of kernel_g1.
double kernel_g1_ds(double s, double x);

// Transition density of the absorbing-barrier diffusion on (0, inf):
// p_s(x, y) = g1(s, y - x) - g1(s, y + x).
double kernel_p(double s, double x, double y);
double kernel_p_ds(double s, double x, double y);

// Boundary flux kernel k_s(y) = y g1(s, y) / s.
double kernel_k(double s, double y);
double kernel_k_ds(double s, double y);

// Mass retained by the absorbing kind started at x after time s.
double absorbing_mass(double s, double x);

}  // namespace mehler
