#pragma once

#include <optional>
#include <string>

#include "ksub/model.hpp"

namespace ksub {

/// Serializable model description. Three kinds:
///   eck        E(kappa, tau) preset; fixes its own domain.
///   canonical  explicit lambda, a, b expression strings in x, y.
///   from_tau   lambda and tau expression strings; the gauge is produced by
///              model_from_tau and needs a domain star-shaped about 0.
struct ModelDescriptor {
    enum class Kind { Eck, Canonical, FromTau };

    Kind kind = Kind::Eck;
    double kappa = 0.0;            // eck
    double tau0 = 0.0;             // eck
    std::string lambda;            // canonical, from_tau
    std::string a, b;              // canonical
    std::string tau;               // from_tau
    std::optional<Domain> domain;  // canonical, from_tau; absent = full plane
};

/// JSON shape:
///   {"kind": "eck", "kappa": -1, "tau": 0.5}
///   {"kind": "canonical", "lambda": "1", "a": "0", "b": "x",
///    "domain": {"rect": {"x0": -1, "x1": 1, "y0": -1, "y1": 1}}}
///   {"kind": "from_tau", "lambda": "1", "tau": "x",
///    "domain": {"disk": {"radius": 2}}}
/// Malformed input throws ParseError.
ModelDescriptor parse_model_json(const std::string& text);

/// Reads the file and delegates to parse_model_json. Unreadable file is a
/// ParseError.
ModelDescriptor load_model_file(const std::string& path);

/// Canonical JSON rendering of a descriptor (single line, keys in the order
/// shown above, numbers via format_double).
std::string model_to_json(const ModelDescriptor& d);

/// Validates expressions and domain and constructs the model. Expression
/// errors surface as ParseError, geometric ones (lambda <= 0, bad domain for
/// from_tau) as DomainError or std::invalid_argument.
KillingModel build_model(const ModelDescriptor& d);

/// Shortest round-trip decimal form (printf %.17g).
std::string format_double(double v);

}  // namespace ksub
