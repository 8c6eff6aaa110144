#include "gatesynth/hamlib.hpp"

#include "gatesynth/errors.hpp"

namespace gatesynth {

SystemPair ibmq3() {
  SystemPair s;
  s.label = "ibmq3";
  s.h0 = CMatrix::Zero(3, 3);
  s.h0(1, 1) = 0.5159;
  s.h0(2, 2) = 1.0;
  s.hc = CMatrix::Zero(3, 3);
  s.hc(0, 1) = s.hc(1, 0) = 0.7071;
  s.hc(1, 2) = s.hc(2, 1) = 1.0;
  return s;
}

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Tensor product of single-qubit operators, site 0 leftmost.
CMatrix lift(int qubits, int site, const CMatrix& op, int site2 = -1, const CMatrix& op2 = {}) {
  CMatrix out = CMatrix::Identity(1, 1);
  const CMatrix id = CMatrix::Identity(2, 2);
  for (int q = 0; q < qubits; ++q) {
    const CMatrix& factor = q == site ? op : (q == site2 ? op2 : id);
    out = kron(out, factor);
  }
  return out;
}

}  // namespace

SystemPair build_ising(int qubits, double coupling) {
  if (qubits < 2 || qubits > 7) throw InvalidArgument("Ising chain needs 2 <= N <= 7 qubits");
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  CMatrix z(2, 2);
  z << 1, 0, 0, -1;

  const Eigen::Index d = Eigen::Index{1} << qubits;
  SystemPair s;
  s.label = "ising" + std::to_string(qubits);
  s.h0 = CMatrix::Zero(d, d);
  s.hc = CMatrix::Zero(d, d);
  for (int i = 0; i + 1 < qubits; ++i) s.h0 -= coupling * lift(qubits, i, z, i + 1, z);
  for (int i = 0; i < qubits; ++i) s.hc += lift(qubits, i, x);
  return s;
}

}  // namespace gatesynth
