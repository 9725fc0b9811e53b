#ifndef HSLYAP_BUNDLE_IO_HPP
#define HSLYAP_BUNDLE_IO_HPP

#include <iosfwd>
#include <map>
#include <string>

#include "hslyap/models.hpp"

namespace hslyap {

// Text fixture format: a header with model parameters followed by labeled
// matrix dumps, full double precision, no binary payloads.
void write_bundle(std::ostream& out, const NormalFormBundle& bundle);

struct BundleRecord {
  ModelParams params;
  SymmetryClass cls = SymmetryClass::Complex;
  std::map<std::string, Matrix> matrices;  // M, Q, N, R_h, R_e
  RealVector mu, kappa, eta;
  std::string raw_class;
};

BundleRecord read_bundle(std::istream& in);

// Largest per-matrix deviation between a bundle and a stored record.
double bundle_record_distance(const NormalFormBundle& bundle, const BundleRecord& record);

}  // namespace hslyap

#endif
