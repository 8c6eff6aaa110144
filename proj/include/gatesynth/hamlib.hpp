#pragma once

#include <string>

#include "gatesynth/polymat.hpp"

namespace gatesynth {

/// Drift and control Hamiltonians of one test system.
struct SystemPair {
  CMatrix h0;
  CMatrix hc;
  std::string label;
};

/// Scaled three-level transmon model (IBM-Q style), values at 4 decimals.
SystemPair ibmq3();

/// Open Ising chain: H0 = -J sum_i Z_i Z_{i+1}, Hc = sum_i X_i, 2 <= N <= 7.
SystemPair build_ising(int qubits, double coupling = 1.0);

}  // namespace gatesynth
