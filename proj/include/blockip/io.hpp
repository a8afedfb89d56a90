// Textual file formats: instances, matrices, vector sequences, bases and
// result files. One canonical human-diffable format, integer-exact, with
// explicit -inf/+inf tokens and a version header per file kind.
#pragma once

#include <iosfwd>
#include <string>

#include "blockip/graver.hpp"
#include "blockip/instance.hpp"
#include "blockip/solver.hpp"

namespace blockip {

IPInstance parse_instance(std::istream& in, const std::string& name);
IPInstance parse_instance_file(const std::string& path);
std::string serialize_instance(const IPInstance& inst);

SmallMatrix parse_matrix(std::istream& in, const std::string& name);
SmallMatrix parse_matrix_file(const std::string& path);
std::string serialize_matrix(const SmallMatrix& m);

std::vector<std::vector<i64>> parse_vectors(std::istream& in,
                                            const std::string& name);
std::vector<std::vector<i64>> parse_vectors_file(const std::string& path);
std::string serialize_vectors(const std::vector<std::vector<i64>>& vectors);

std::string serialize_basis(const GraverSet& basis);
GraverSet parse_basis(std::istream& in, const std::string& name);
GraverSet parse_basis_file(const std::string& path);

// Result files embed re-checkable verdicts (constraint residual, bounds,
// objective consistency) so downstream scripts can verify without
// recomputing.
std::string serialize_result(const IPInstance& inst, const SolveResult& res);

void write_file(const std::string& path, const std::string& content);

}  // namespace blockip
