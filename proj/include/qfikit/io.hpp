#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qfikit/linalg.hpp"
#include "qfikit/model.hpp"

namespace qfikit {

using nlohmann::json;

// Matrices larger than this are refused at the parse boundary; the dense
// backend is not meant for them.
inline constexpr Eigen::Index kMaxParsedDim = 1024;

/// 17-significant-digit decimal ("%.17g"); negative zero is folded into
/// "0" so equal values always print identically.
inline std::string format_g17(double x) {
    if (x == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("invalid JSON in " + path + ": " + e.what());
    }
}

namespace detail {

inline double number_at(const json& j, const std::string& where) {
    if (!j.is_number())
        throw SchemaError(where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw SchemaError(where + " must be finite");
    return v;
}

inline RealVector parse_real_part(const json& j, Eigen::Index dim,
                                  const std::string& where,
                                  Eigen::Index row) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim)
        throw SchemaError(where + " row " + std::to_string(row) +
                          " must be an array of " + std::to_string(dim) +
                          " numbers");
    RealVector out(dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        out(c) = number_at(j[static_cast<std::size_t>(c)],
                           where + "[" + std::to_string(row) + "][" +
                               std::to_string(c) + "]");
    return out;
}

}  // namespace detail

/// Parses the wire form of a complex matrix,
/// {"dim": d, "re": [[...]], "im": [[...]]}, with full shape checking.
inline ComplexMatrix parse_matrix(const json& j, const std::string& where) {
    if (!j.is_object())
        throw SchemaError(where + " must be an object with dim/re/im");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw SchemaError(where + ".dim must be an integer");
    const auto dim = j["dim"].get<std::int64_t>();
    if (dim < 1 || dim > kMaxParsedDim)
        throw SchemaError(where + ".dim must be in [1, " +
                          std::to_string(kMaxParsedDim) + "], got " +
                          std::to_string(dim));
    const Eigen::Index d = static_cast<Eigen::Index>(dim);
    for (const char* part : {"re", "im"}) {
        if (!j.contains(part) || !j[part].is_array() ||
            static_cast<Eigen::Index>(j[part].size()) != d)
            throw SchemaError(where + "." + part + " must be an array of " +
                              std::to_string(d) + " rows");
    }
    ComplexMatrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const RealVector re = detail::parse_real_part(
            j["re"][static_cast<std::size_t>(r)], d, where + ".re", r);
        const RealVector im = detail::parse_real_part(
            j["im"][static_cast<std::size_t>(r)], d, where + ".im", r);
        for (Eigen::Index c = 0; c < d; ++c)
            m(r, c) = Complex(re(c), im(c));
    }
    return m;
}

inline json matrix_to_json(const ComplexMatrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json rre = json::array(), rim = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rre.push_back(m(r, c).real());
            rim.push_back(m(r, c).imag());
        }
        re.push_back(std::move(rre));
        im.push_back(std::move(rim));
    }
    return json{{"dim", m.rows()}, {"re", std::move(re)},
                {"im", std::move(im)}};
}

/// Model file: {"H_I": matrix, "H_0": matrix | null, "lambda": x,
/// "eta": y}. A null H_0 means undisturbed dynamics; eta is forced to 0.
inline DisturbedModel parse_model(const json& j, const std::string& where) {
    if (!j.is_object())
        throw SchemaError(where + " must be an object");
    for (const char* key : {"H_I", "H_0", "lambda", "eta"})
        if (!j.contains(key))
            throw SchemaError(where + " is missing required key \"" +
                              std::string(key) + "\"");
    const ComplexMatrix gi = parse_matrix(j["H_I"], where + ".H_I");
    HermitianOperator generator = validate_hermitian(gi);
    const double lambda =
        detail::number_at(j["lambda"], where + ".lambda");
    double eta = detail::number_at(j["eta"], where + ".eta");

    HermitianOperator disturbance = HermitianOperator::unchecked(
        ComplexMatrix::Zero(generator.dim(), generator.dim()));
    if (j["H_0"].is_null()) {
        eta = 0.0;  // no disturbance operator, strength is meaningless
    } else {
        disturbance =
            validate_hermitian(parse_matrix(j["H_0"], where + ".H_0"));
    }
    return DisturbedModel(std::move(generator), std::move(disturbance),
                          lambda, eta);
}

inline DisturbedModel load_model_file(const std::string& path) {
    return parse_model(load_json_file(path), path);
}

inline DensityMatrix load_density_file(const std::string& path) {
    return validate_density(parse_matrix(load_json_file(path), path));
}

}  // namespace qfikit
