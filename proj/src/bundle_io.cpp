#include "hslyap/bundle_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace hslyap {

namespace {

void write_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j).real() << ' ' << m(i, j).imag();
    }
    out << '\n';
  }
}

void write_real_vector(std::ostream& out, const std::string& name, const RealVector& v) {
  out << "vector " << name << ' ' << v.size() << '\n';
  for (int i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << v[i];
  }
  out << '\n';
}

}  // namespace

void write_bundle(std::ostream& out, const NormalFormBundle& b) {
  out << std::setprecision(17);
  out << "hslyap-bundle v1\n";
  out << "model " << model_name(b.params.model) << '\n';
  out << "class " << class_name(b.cls) << '\n';
  out << "L " << b.params.L << '\n';
  out << "E " << b.params.E << '\n';
  out << "lambda " << b.params.lambda << '\n';
  out << "phi " << b.params.phi << '\n';
  out << "t " << b.params.t << '\n';
  out << "slabN " << b.params.N << '\n';
  out << "slabd " << b.params.d << '\n';
  out << "disorder " << disorder_name(b.params.disorder) << '\n';
  write_real_vector(out, "mu", b.channels.mu);
  write_real_vector(out, "kappa", b.channels.kappa);
  write_real_vector(out, "eta", b.channels.eta);
  write_matrix(out, "M", b.M);
  write_matrix(out, "Q", b.Q);
  write_matrix(out, "N", b.N);
  write_matrix(out, "R_h", b.R_h);
  write_matrix(out, "R_e", b.R_e);
}

BundleRecord read_bundle(std::istream& in) {
  BundleRecord rec;
  std::string line;
  if (!std::getline(in, line) || line != "hslyap-bundle v1")
    throw Error("bundle fixture: bad magic line");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "model") {
      std::string name;
      ls >> name;
      auto m = model_from_name(name);
      if (!m) throw Error("bundle fixture: unknown model " + name);
      rec.params.model = *m;
    } else if (key == "class") {
      ls >> rec.raw_class;
      if (rec.raw_class == "R") rec.cls = SymmetryClass::Real;
      else if (rec.raw_class == "C") rec.cls = SymmetryClass::Complex;
      else if (rec.raw_class == "H") rec.cls = SymmetryClass::Quaternion;
      else throw Error("bundle fixture: unknown class " + rec.raw_class);
    } else if (key == "L") ls >> rec.params.L;
    else if (key == "E") ls >> rec.params.E;
    else if (key == "lambda") ls >> rec.params.lambda;
    else if (key == "phi") ls >> rec.params.phi;
    else if (key == "t") ls >> rec.params.t;
    else if (key == "slabN") ls >> rec.params.N;
    else if (key == "slabd") ls >> rec.params.d;
    else if (key == "disorder") {
      std::string name;
      ls >> name;
      if (name == "uniform") rec.params.disorder = Disorder::UniformSqrt3;
      else if (name == "binary") rec.params.disorder = Disorder::BinaryPM1;
      else if (name == "gauss") rec.params.disorder = Disorder::TruncatedGauss;
      else throw Error("bundle fixture: unknown disorder " + name);
    } else if (key == "vector") {
      std::string name;
      long n;
      ls >> name >> n;
      RealVector v(n);
      for (long i = 0; i < n; ++i)
        if (!(in >> v[i])) throw Error("bundle fixture: truncated vector " + name);
      std::getline(in, line);
      if (name == "mu") rec.mu = v;
      else if (name == "kappa") rec.kappa = v;
      else if (name == "eta") rec.eta = v;
    } else if (key == "matrix") {
      std::string name;
      long rows, cols;
      ls >> name >> rows >> cols;
      Matrix m(rows, cols);
      for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
          double re, im;
          if (!(in >> re >> im)) throw Error("bundle fixture: truncated matrix " + name);
          m(i, j) = Complex(re, im);
        }
      std::getline(in, line);
      rec.matrices[name] = std::move(m);
    } else {
      throw Error("bundle fixture: unknown key " + key);
    }
  }
  return rec;
}

double bundle_record_distance(const NormalFormBundle& b, const BundleRecord& rec) {
  double d = 0.0;
  auto cmp = [&](const char* name, const Matrix& m) {
    auto it = rec.matrices.find(name);
    if (it == rec.matrices.end() || it->second.rows() != m.rows() ||
        it->second.cols() != m.cols())
      throw Error(std::string("bundle fixture: missing or mis-sized matrix ") + name);
    d = std::max(d, max_abs(it->second - m));
  };
  cmp("M", b.M);
  cmp("Q", b.Q);
  cmp("N", b.N);
  cmp("R_h", b.R_h);
  cmp("R_e", b.R_e);
  if (rec.mu.size() == b.channels.mu.size())
    d = std::max(d, (rec.mu - b.channels.mu).cwiseAbs().maxCoeff());
  else
    throw Error("bundle fixture: mu size mismatch");
  return d;
}

}  // namespace hslyap
