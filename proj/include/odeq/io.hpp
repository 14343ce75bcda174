#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "odeq/hatano_nelson.hpp"
#include "odeq/problem.hpp"

namespace odeq {

using json = nlohmann::ordered_json;

/// Text form: one term per line, "coeff_re coeff_im AXES".
std::string pauli_sum_to_text(const PauliSum& s);
PauliSum pauli_sum_from_text(std::string_view text, std::size_t n);

/// JSON term list [[re, im, axes], ...].
json pauli_sum_to_json(const PauliSum& s);
PauliSum pauli_sum_from_json(const json& j, std::size_t n);

/// State spec {kind: "basis"|"uniform"|"amplitudes", ...}.
StateVector state_from_json(const json& j, std::size_t n);
json state_to_json(const StateVector& s);

/// Problem files {n, H, jumps, psi0, T}; doubles round-trip bit-exactly.
OdeProblem problem_from_json(const json& j);
json problem_to_json(const OdeProblem& p);
OdeProblem load_problem(const std::filesystem::path& path);
void save_problem(const std::filesystem::path& path, const OdeProblem& p);

/// Dense generator file {n, A: [[[re, im], ...], ...], psi0, T}.
OdeProblem problem_from_dense_json(const json& j);

/// Hatano-Nelson experiment config
/// {sites, J, gamma, V0 | V_matrix, psi0?, T}; psi0 defaults to a single
/// occupied site at the left edge.
HNParams hn_params_from_json(const json& j);
StateVector hn_psi0_from_json(const json& j, int sites);

/// Debug dump: little-endian f64 amplitudes, interleaved re/im.
void write_amplitude_dump(std::ostream& out, const StateVector& s);

/// Hex SHA-1 of the bytes in git blob framing ("blob <len>\0" + data).
std::string git_blob_sha1(std::string_view data);

}  // namespace odeq
