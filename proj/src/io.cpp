#include "odeq/io.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "odeq/errors.hpp"

namespace odeq {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string pauli_sum_to_text(const PauliSum& s) {
  std::string out;
  for (const auto& term : s.terms()) {
    out += format_double(term.coeff.real());
    out += ' ';
    out += format_double(term.coeff.imag());
    out += ' ';
    out += term.string.axes();
    out += '\n';
  }
  return out;
}

PauliSum pauli_sum_from_text(std::string_view text, std::size_t n) {
  std::vector<PauliTerm> terms;
  std::istringstream stream{std::string(text)};
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    double re = 0.0, im = 0.0;
    std::string axes;
    if (!(fields >> re >> im >> axes)) {
      throw ValidationError("pauli_sum_from_text: malformed line '" + line + "'");
    }
    if (axes.size() != n) {
      throw DimensionError("pauli_sum_from_text: axes length " +
                           std::to_string(axes.size()) + " != " +
                           std::to_string(n));
    }
    terms.push_back({Complex(re, im), PauliString(axes)});
  }
  return PauliSum(n, std::move(terms));
}

json pauli_sum_to_json(const PauliSum& s) {
  json terms = json::array();
  for (const auto& term : s.terms()) {
    terms.push_back(json::array(
        {term.coeff.real(), term.coeff.imag(), term.string.axes()}));
  }
  return terms;
}

PauliSum pauli_sum_from_json(const json& j, std::size_t n) {
  if (!j.is_array()) throw ConfigError("Pauli sum must be an array of terms");
  std::vector<PauliTerm> terms;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 3) {
      throw ConfigError("Pauli term must be [re, im, axes]");
    }
    const std::string axes = entry.at(2).get<std::string>();
    if (axes.size() != n) {
      throw ConfigError("Pauli term axes '" + axes + "' must have length " +
                        std::to_string(n));
    }
    terms.push_back({Complex(entry.at(0).get<double>(), entry.at(1).get<double>()),
                     PauliString(axes)});
  }
  return PauliSum(n, std::move(terms));
}

StateVector state_from_json(const json& j, std::size_t n) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError("psi0 must be {kind: basis|uniform|amplitudes, ...}");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "basis") {
    const std::uint64_t index = j.value("index", std::uint64_t{0});
    return StateVector::basis(n, index);
  }
  if (kind == "uniform") {
    return StateVector::uniform(n);
  }
  if (kind == "amplitudes") {
    if (!j.contains("data") || !j.at("data").is_array()) {
      throw ConfigError("psi0 amplitudes need a data array of [re, im] pairs");
    }
    std::vector<Complex> amps;
    for (const auto& pair : j.at("data")) {
      if (!pair.is_array() || pair.size() != 2) {
        throw ConfigError("amplitude entries must be [re, im]");
      }
      amps.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    return StateVector::from_amplitudes(n, std::move(amps));
  }
  throw ConfigError("unknown psi0 kind '" + kind + "'");
}

json state_to_json(const StateVector& s) {
  json data = json::array();
  for (const Complex& a : s.amplitudes()) {
    data.push_back(json::array({a.real(), a.imag()}));
  }
  return json{{"kind", "amplitudes"}, {"data", std::move(data)}};
}

OdeProblem problem_from_json(const json& j) {
  for (const char* key : {"n", "H", "jumps", "psi0", "T"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("problem file missing key '") + key + "'");
    }
  }
  const std::size_t n = j.at("n").get<std::size_t>();
  PauliSum h = pauli_sum_from_json(j.at("H"), n);
  std::vector<PauliSum> jumps;
  for (const auto& jump : j.at("jumps")) {
    jumps.push_back(pauli_sum_from_json(jump, n));
  }
  StateVector psi0 = state_from_json(j.at("psi0"), n);
  const double t = j.at("T").get<double>();
  const double shift = j.value("norm_shift", 0.0);
  return OdeProblem(std::move(h), std::move(jumps), std::move(psi0), t, shift);
}

json problem_to_json(const OdeProblem& p) {
  json jumps = json::array();
  for (const auto& jump : p.jumps()) jumps.push_back(pauli_sum_to_json(jump));
  json out{{"n", p.num_qubits()},
           {"H", pauli_sum_to_json(p.hamiltonian())},
           {"jumps", std::move(jumps)},
           {"psi0", state_to_json(p.psi0())},
           {"T", p.final_time()}};
  if (p.norm_shift() != 0.0) out["norm_shift"] = p.norm_shift();
  return out;
}

OdeProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return problem_from_json(j);
}

void save_problem(const std::filesystem::path& path, const OdeProblem& p) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write problem file " + path.string());
  out << problem_to_json(p).dump(2) << '\n';
}

OdeProblem problem_from_dense_json(const json& j) {
  for (const char* key : {"n", "A", "psi0", "T"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("dense problem file missing key '") + key + "'");
    }
  }
  const std::size_t n = j.at("n").get<std::size_t>();
  const Eigen::Index dim = Eigen::Index{1} << n;
  const json& rows = j.at("A");
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim) {
    throw ConfigError("dense matrix A must have 2^n rows");
  }
  DenseMatrix a(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const json& row = rows.at(r);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      throw ConfigError("dense matrix A must have 2^n columns per row");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      const json& entry = row.at(c);
      if (!entry.is_array() || entry.size() != 2) {
        throw ConfigError("dense matrix entries must be [re, im]");
      }
      a(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  StateVector psi0 = state_from_json(j.at("psi0"), n);
  return problem_from_dense(a, std::move(psi0), j.at("T").get<double>());
}

HNParams hn_params_from_json(const json& j) {
  for (const char* key : {"sites", "J", "gamma", "T"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("HN config missing key '") + key + "'");
    }
  }
  HNParams params;
  params.sites = j.at("sites").get<int>();
  params.coupling = j.at("J").get<double>();
  params.gamma = j.at("gamma").get<double>();
  params.final_time = j.at("T").get<double>();
  if (j.contains("V_matrix")) {
    const json& rows = j.at("V_matrix");
    if (!rows.is_array() || static_cast<int>(rows.size()) != params.sites) {
      throw ConfigError("V_matrix must be sites x sites");
    }
    params.interactions = Eigen::MatrixXd::Zero(params.sites, params.sites);
    for (int r = 0; r < params.sites; ++r) {
      const json& row = rows.at(r);
      if (!row.is_array() || static_cast<int>(row.size()) != params.sites) {
        throw ConfigError("V_matrix must be sites x sites");
      }
      for (int c = 0; c < params.sites; ++c) {
        params.interactions(r, c) = row.at(c).get<double>();
      }
    }
  } else {
    params.interactions =
        nearest_neighbor_interactions(params.sites, j.value("V0", 0.0));
  }
  return params;
}

StateVector hn_psi0_from_json(const json& j, int sites) {
  if (j.contains("psi0")) return state_from_json(j.at("psi0"), sites);
  // Default: one fermion on the leftmost site.
  return StateVector::basis(sites, std::uint64_t{1} << (sites - 1));
}

void write_amplitude_dump(std::ostream& out, const StateVector& s) {
  for (const Complex& a : s.amplitudes()) {
    const double re = a.real();
    const double im = a.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(double));
    out.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
}

namespace {

// Compact SHA-1 (FIPS 180-1), enough for content fingerprints.
class Sha1 {
 public:
  void update(const unsigned char* data, std::size_t len) {
    total_ += len;
    while (len > 0) {
      const std::size_t take = std::min(len, std::size_t{64} - fill_);
      std::memcpy(block_.data() + fill_, data, take);
      fill_ += take;
      data += take;
      len -= take;
      if (fill_ == 64) {
        process();
        fill_ = 0;
      }
    }
  }

  std::string hex_digest() {
    const std::uint64_t bits = total_ * 8;
    const unsigned char pad = 0x80;
    update(&pad, 1);
    const unsigned char zero = 0x00;
    while (fill_ != 56) update(&zero, 1);
    unsigned char len_bytes[8];
    for (int i = 0; i < 8; ++i) {
      len_bytes[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    }
    total_ -= 9;  // padding is not payload; keep bookkeeping consistent
    update(len_bytes, 8);
    char out[41];
    for (int i = 0; i < 5; ++i) {
      std::snprintf(out + 8 * i, 9, "%08x", h_[i]);
    }
    return std::string(out, 40);
  }

 private:
  static std::uint32_t rotl(std::uint32_t v, int s) {
    return (v << s) | (v >> (32 - s));
  }

  void process() {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i) {
      w[i] = (std::uint32_t(block_[4 * i]) << 24) |
             (std::uint32_t(block_[4 * i + 1]) << 16) |
             (std::uint32_t(block_[4 * i + 2]) << 8) |
             std::uint32_t(block_[4 * i + 3]);
    }
    for (int i = 16; i < 80; ++i) {
      w[i] = rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    }
    std::uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3], e = h_[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDC;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6;
      }
      const std::uint32_t temp = rotl(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rotl(b, 30);
      b = a;
      a = temp;
    }
    h_[0] += a;
    h_[1] += b;
    h_[2] += c;
    h_[3] += d;
    h_[4] += e;
  }

  std::array<unsigned char, 64> block_{};
  std::size_t fill_ = 0;
  std::uint64_t total_ = 0;
  std::array<std::uint32_t, 5> h_{0x67452301, 0xEFCDAB89, 0x98BADCFE,
                                  0x10325476, 0xC3D2E1F0};
};

}  // namespace

std::string git_blob_sha1(std::string_view data) {
  Sha1 sha;
  const std::string header = "blob " + std::to_string(data.size());
  sha.update(reinterpret_cast<const unsigned char*>(header.data()),
             header.size() + 1);  // includes the trailing NUL
  sha.update(reinterpret_cast<const unsigned char*>(data.data()), data.size());
  return sha.hex_digest();
}

}  // namespace odeq
