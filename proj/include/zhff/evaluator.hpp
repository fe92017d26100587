// Copyright 2026 The zhff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "zhff/diagram.hpp"
#include "zhff/field.hpp"
#include "zhff/scalar.hpp"

namespace zhff {

/// Dense tensor of exact scalars with m outputs and n inputs.
///
/// The flat index lists output values first, then input values, each digit
/// an element index in base q with the first wire most significant. Read as
/// a matrix, rows are output tuples and columns are input tuples.
class ExactTensor {
   public:
    ExactTensor() = default;
    ExactTensor(FieldPtr field, std::uint32_t n_in, std::uint32_t n_out);

    const FieldPtr& field() const { return field_; }
    RingContext ring() const { return RingContext::of(*field_); }
    std::uint32_t n_in() const { return n_in_; }
    std::uint32_t n_out() const { return n_out_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const std::vector<Scalar>& entries() const { return entries_; }
    Scalar& operator[](std::size_t flat) { return entries_[flat]; }
    const Scalar& operator[](std::size_t flat) const { return entries_[flat]; }
    Scalar& at(std::size_t row, std::size_t col) { return entries_[row * cols_ + col]; }
    const Scalar& at(std::size_t row, std::size_t col) const { return entries_[row * cols_ + col]; }

    /// Row or column number of a tuple of element indices.
    std::size_t tuple_index(std::span<const std::uint32_t> values) const;
    std::vector<std::uint32_t> tuple_of(std::size_t index, std::uint32_t wires) const;

   private:
    FieldPtr field_;
    std::uint32_t n_in_ = 0;
    std::uint32_t n_out_ = 0;
    std::size_t rows_ = 1;
    std::size_t cols_ = 1;
    std::vector<Scalar> entries_;
};

struct NumericTensor {
    std::uint32_t q = 2;
    std::uint32_t n_in = 0;
    std::uint32_t n_out = 0;
    std::vector<std::complex<double>> entries;
};

enum class ContractionOrder {
    /// Eliminate the variable whose neighbourhood is smallest.
    Greedy,
    /// Eliminate variables in creation order.
    Sequential,
};

/// The defining tensor of a single generator.
ExactTensor generator_tensor(const Node& node, const FieldPtr& field);

ExactTensor contract(const Diagram& d, ContractionOrder order = ContractionOrder::Greedy);
/// Floating-point contraction along the same factor graph.
NumericTensor contract_numeric(const Diagram& d, ContractionOrder order = ContractionOrder::Greedy);
NumericTensor to_numeric(const ExactTensor& t);
/// Largest entrywise distance.
double max_abs_diff(const NumericTensor& a, const NumericTensor& b);

bool equal_tensors(const ExactTensor& a, const ExactTensor& b);
/// Entrywise Scalar equality of the two contractions; arities must agree.
bool equal_diagrams(const Diagram& d1, const Diagram& d2);
/// Exact check of M^dagger M = I.
bool is_unitary(const ExactTensor& t);
bool is_unitary(const Diagram& d);

/// a after b, as matrices.
ExactTensor matmul(const ExactTensor& a, const ExactTensor& b);
ExactTensor adjoint(const ExactTensor& t);
/// Entry of the closed (0-to-0) tensor.
Scalar scalar_value(const Diagram& d);

/// Folds every component that touches no boundary into the scalar factor.
Diagram normalize_scalars(const Diagram& d);

nlohmann::json to_json(const ExactTensor& t);
nlohmann::json to_json(const NumericTensor& t);
/// Reads {"field", "inputs", "outputs", "entries"}; `field` overrides or supplies
/// the field when the document does not name one.
ExactTensor tensor_from_json(const nlohmann::json& j, FieldPtr field = nullptr);

}  // namespace zhff
