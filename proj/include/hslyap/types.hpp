#ifndef HSLYAP_TYPES_HPP
#define HSLYAP_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace hslyap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

inline constexpr Complex iu{0.0, 1.0};

// Universality class tag. Quaternion data is always handled as 2x2 complex
// blocks, so the ambient complex dimension doubles for class H.
enum class SymmetryClass { Real, Complex, Quaternion };

inline const char* class_name(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::Real: return "R";
    case SymmetryClass::Complex: return "C";
    case SymmetryClass::Quaternion: return "H";
  }
  return "?";
}

// Number of complex rows per channel-half: L for R/C, 2L for H.
inline int ambient_size(SymmetryClass c, int channels) {
  return c == SymmetryClass::Quaternion ? 2 * channels : channels;
}

// tau normalization of the additive cocycles: 1 for R/C, 1/2 (of Tr_2) for H.
inline double tau_factor(SymmetryClass c) {
  return c == SymmetryClass::Quaternion ? 0.5 : 1.0;
}

// Complex column width of one channel: 1 for R/C, 2 for H.
inline int channel_width(SymmetryClass c) {
  return c == SymmetryClass::Quaternion ? 2 : 1;
}

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : Error {
  DimensionError(const std::string& where, long expected, long got)
      : Error(where + ": expected size " + std::to_string(expected) +
              ", got " + std::to_string(got)),
        expected(expected), got(got) {}
  long expected, got;
};

struct InvariantViolation : Error {
  using Error::Error;
};

// A channel sits within parabolic tolerance of |mu| = 2 (Jordan block).
struct InternalBandEdge : Error {
  InternalBandEdge(int channel, double abs_mu)
      : Error("internal band edge: channel " + std::to_string(channel) +
              " has |mu| = " + std::to_string(abs_mu)),
        channel(channel), abs_mu(abs_mu) {}
  int channel;
  double abs_mu;
};

// Appendix-B constellation degenerate within tolerance.
struct DegenerateBlock : Error {
  DegenerateBlock(const std::string& what, int frequency_index = -1)
      : Error(frequency_index >= 0
                  ? what + " (frequency index " + std::to_string(frequency_index) + ")"
                  : what),
        frequency_index(frequency_index) {}
  int frequency_index;
};

// T*Phi numerically rank deficient during the Gram-Schmidt action.
struct SingularAction : Error {
  SingularAction(int column, double diag)
      : Error("singular Gram-Schmidt action at column " + std::to_string(column) +
              " (pivot " + std::to_string(diag) + ")"),
        column(column), step(-1) {}
  int column;
  long step;
};

inline double max_abs(const Matrix& a) {
  return a.cwiseAbs().maxCoeff();
}

}  // namespace hslyap

#endif
