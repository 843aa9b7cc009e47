#pragma once

#include "nmpinv/invlearn/dataset.hpp"

namespace nmpinv::invlearn {

// Bound on |u(k+p) - u(k)| for u = A sin(2 pi t / T) sampled every dt: the Taylor series
// sum_i (2 pi p dt / T)^i A / i! in closed form, A (exp(2 pi p dt / T) - 1).
double taylor_correlation_bound(double amplitude, double period, double dt, int p);

// Largest label difference between rows whose feature vectors lie within tol of each other
// (infinity norm). Small values mean the data admit a function fit.
double max_label_spread(const TrainingDataset& ds, double tol = 1e-6);

}  // namespace nmpinv::invlearn
