#pragma once
#include <iosfwd>
#include <string>
#include <variant>

#include "zitter/grid.hpp"

namespace zitter::io {

// Text field format, one header line then whitespace-separated node values in
// row-major order. Header:
//   zfield <scalar|vector|wave> <cartesian|radial> <boundary> <dim>
//          <n...> <h...> <origin...> [mass hbar]
// Scalar payload: one value per node. Vector: dim values per node.
// Wave: re im per node; header carries mass and hbar.
void write_field(std::ostream& os, const ScalarField& f);
void write_field(std::ostream& os, const VectorField& f);
void write_field(std::ostream& os, const WaveFunction& f);
void save_field(const std::string& path, const ScalarField& f);
void save_field(const std::string& path, const VectorField& f);
void save_field(const std::string& path, const WaveFunction& f);

using AnyField = std::variant<ScalarField, VectorField, WaveFunction>;
AnyField read_field(std::istream& is, const std::string& name = "<stream>");
AnyField load_field(const std::string& path);
ScalarField load_scalar(const std::string& path);
VectorField load_vector(const std::string& path);
WaveFunction load_wave(const std::string& path);

// CSV with node coordinates followed by values, one node per row.
std::string field_csv(const ScalarField& f);
std::string field_csv(const VectorField& f);

// Shortest round-trip formatting used by every text emitter.
std::string fmt(double v);

}  // namespace zitter::io
