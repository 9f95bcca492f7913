#pragma once

namespace thetaconf {

// Caps OpenMP threads used by the assembly kernels. n <= 0 restores the default.
void set_thread_limit(int n);
int thread_limit();
// Reads THETACONF_THREADS if set.
void apply_thread_env();

} // namespace thetaconf
