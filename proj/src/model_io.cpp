#include "ksub/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ksub/errors.hpp"

namespace ksub {

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ParseError(std::string("model: missing numeric field \"") + key + "\"", 0);
    return j.at(key).get<double>();
}

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw ParseError(std::string("model: missing string field \"") + key + "\"", 0);
    return j.at(key).get<std::string>();
}

std::optional<Domain> parse_domain(const json& j) {
    if (!j.contains("domain")) return std::nullopt;
    const json& d = j.at("domain");
    if (!d.is_object()) throw ParseError("model: domain must be an object", 0);
    try {
        if (d.contains("disk")) return Domain::disk(require_number(d.at("disk"), "radius"));
        if (d.contains("rect")) {
            const json& r = d.at("rect");
            return Domain::rect(require_number(r, "x0"), require_number(r, "x1"),
                                require_number(r, "y0"), require_number(r, "y1"));
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("model: ") + e.what(), 0);
    }
    throw ParseError("model: domain needs a \"disk\" or \"rect\" entry", 0);
}

std::string domain_json(const Domain& d) {
    switch (d.kind) {
        case DomainKind::Disk:
            return "{\"disk\":{\"radius\":" + format_double(d.radius) + "}}";
        case DomainKind::Rect:
            return "{\"rect\":{\"x0\":" + format_double(d.x0) + ",\"x1\":" + format_double(d.x1) +
                   ",\"y0\":" + format_double(d.y0) + ",\"y1\":" + format_double(d.y1) + "}}";
        case DomainKind::FullPlane:
            break;
    }
    return "null";
}

std::string quote(const std::string& s) {
    // Expression strings never need escapes beyond the quote itself.
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

ModelDescriptor parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model: ") + e.what(), e.byte);
    }
    if (!j.is_object()) throw ParseError("model: top level must be an object", 0);

    ModelDescriptor d;
    const std::string kind = require_string(j, "kind");
    if (kind == "eck") {
        d.kind = ModelDescriptor::Kind::Eck;
        d.kappa = require_number(j, "kappa");
        d.tau0 = require_number(j, "tau");
        if (j.contains("domain"))
            throw ParseError("model: eck presets fix their own domain", 0);
    } else if (kind == "canonical") {
        d.kind = ModelDescriptor::Kind::Canonical;
        d.lambda = require_string(j, "lambda");
        d.a = require_string(j, "a");
        d.b = require_string(j, "b");
        d.domain = parse_domain(j);
    } else if (kind == "from_tau") {
        d.kind = ModelDescriptor::Kind::FromTau;
        d.lambda = require_string(j, "lambda");
        d.tau = require_string(j, "tau");
        d.domain = parse_domain(j);
    } else {
        throw ParseError("model: kind must be \"eck\", \"canonical\" or \"from_tau\"", 0);
    }
    return d;
}

ModelDescriptor load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str());
}

std::string model_to_json(const ModelDescriptor& d) {
    std::string out = "{";
    switch (d.kind) {
        case ModelDescriptor::Kind::Eck:
            out += "\"kind\":\"eck\",\"kappa\":" + format_double(d.kappa) +
                   ",\"tau\":" + format_double(d.tau0);
            break;
        case ModelDescriptor::Kind::Canonical:
            out += "\"kind\":\"canonical\",\"lambda\":" + quote(d.lambda) +
                   ",\"a\":" + quote(d.a) + ",\"b\":" + quote(d.b);
            if (d.domain) out += ",\"domain\":" + domain_json(*d.domain);
            break;
        case ModelDescriptor::Kind::FromTau:
            out += "\"kind\":\"from_tau\",\"lambda\":" + quote(d.lambda) +
                   ",\"tau\":" + quote(d.tau);
            if (d.domain) out += ",\"domain\":" + domain_json(*d.domain);
            break;
    }
    return out + "}";
}

KillingModel build_model(const ModelDescriptor& d) {
    switch (d.kind) {
        case ModelDescriptor::Kind::Eck:
            return eck_preset(d.kappa, d.tau0);
        case ModelDescriptor::Kind::Canonical: {
            ConformalSurface s(d.domain.value_or(Domain::full_plane()),
                               ScalarField::from_expr_text(d.lambda));
            return KillingModel(s, ScalarField::from_expr_text(d.a),
                                ScalarField::from_expr_text(d.b));
        }
        case ModelDescriptor::Kind::FromTau: {
            ConformalSurface s(d.domain.value_or(Domain::full_plane()),
                               ScalarField::from_expr_text(d.lambda));
            return model_from_tau(s, ScalarField::from_expr_text(d.tau));
        }
    }
    throw std::logic_error("build_model: bad kind");
}

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace ksub
