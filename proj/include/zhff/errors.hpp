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

#include <stdexcept>
#include <string>

namespace zhff {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

#define ZHFF_DEFINE_ERROR(Name)             \
    class Name : public Error {             \
       public:                              \
        using Error::Error;                 \
    }

ZHFF_DEFINE_ERROR(NotPrime);
ZHFF_DEFINE_ERROR(ReducibleModulus);
ZHFF_DEFINE_ERROR(DivisionByZero);
ZHFF_DEFINE_ERROR(FieldMismatch);
ZHFF_DEFINE_ERROR(ContextMismatch);
ZHFF_DEFINE_ERROR(ArityMismatch);
ZHFF_DEFINE_ERROR(MalformedDiagram);
ZHFF_DEFINE_ERROR(BadParams);
ZHFF_DEFINE_ERROR(InvalidEmbedding);
ZHFF_DEFINE_ERROR(NotEnoughPoints);
ZHFF_DEFINE_ERROR(UndefinedAt);
ZHFF_DEFINE_ERROR(ParseError);

#undef ZHFF_DEFINE_ERROR

}  // namespace zhff
