// Copyright 2026 The Prepsim Authors
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

// JSON serialization for operators and state vectors. An operator record
// carries `dims` (factor dimensions), `kind` (tag string) and `re`/`im`
// (row-major nested lists); a vector record carries `re`/`im` flat lists
// with `im` optional.

#ifndef PREPSIM_SERIALIZE_HPP
#define PREPSIM_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "prepsim/tensor.hpp"

namespace prepsim {

using Json = nlohmann::json;

inline Json operator_to_json(const Operator& op) {
    Json j;
    j["dims"] = op.signature().dims();
    j["kind"] = to_string(op.kind());
    const Matrix& m = op.mat();
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json re_row = Json::array();
        Json im_row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re_row.push_back(m(r, c).real());
            im_row.push_back(m(r, c).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

inline Operator operator_from_json(const Json& j, const Tolerances& tol = {}) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("kind") || !j.contains("re") ||
        !j.contains("im")) {
        throw ValidationError("operator record requires fields dims, kind, re, im");
    }
    std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    DimensionSignature sig(dims);
    OperatorKind kind = operator_kind_from_string(j.at("kind").get<std::string>());

    const Json& re = j.at("re");
    const Json& im = j.at("im");
    const int n = sig.total_dim();
    auto require_shape = [n](const Json& part, const char* name) {
        if (!part.is_array() || static_cast<int>(part.size()) != n) {
            throw ValidationError(std::string("operator record: ") + name + " must be a " +
                                  std::to_string(n) + "-row nested list");
        }
        for (const Json& row : part) {
            if (!row.is_array() || static_cast<int>(row.size()) != n) {
                throw ValidationError(std::string("operator record: every ") + name + " row must have " +
                                      std::to_string(n) + " entries");
            }
        }
    };
    require_shape(re, "re");
    require_shape(im, "im");

    Matrix m(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            m(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
        }
    }
    return Operator(std::move(m), std::move(sig), kind, tol);
}

inline Json vector_to_json(const Vector& v) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        re.push_back(v(k).real());
        im.push_back(v(k).imag());
    }
    return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline Vector vector_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("re")) {
        throw ValidationError("vector record requires field re (and optionally im)");
    }
    std::vector<double> re = j.at("re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) {
        im = j.at("im").get<std::vector<double>>();
        if (im.size() != re.size()) {
            throw ValidationError("vector record: re and im lengths differ");
        }
    }
    Vector v(static_cast<Eigen::Index>(re.size()));
    for (std::size_t k = 0; k < re.size(); ++k) {
        v(static_cast<Eigen::Index>(k)) = Complex(re[k], im[k]);
    }
    return v;
}

}  // namespace prepsim

#endif  // PREPSIM_SERIALIZE_HPP
