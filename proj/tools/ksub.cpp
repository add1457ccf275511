#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ksub/curvature.hpp"
#include "ksub/errors.hpp"
#include "ksub/model.hpp"
#include "ksub/model_io.hpp"
#include "ksub/paths.hpp"
#include "ksub/verify.hpp"

namespace {

using namespace ksub;

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

int fail(const std::string& msg, int code) {
    std::fprintf(stderr, "{\"error\":\"%s\",\"code\":%d}\n", json_escape(msg).c_str(), code);
    return code;
}

double parse_double(std::string_view text, const char* what) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end)
        throw ParseError(std::string(what) + ": expected a number, got \"" + std::string(text) +
                             "\"",
                         0);
    return v;
}

std::vector<double> parse_components(const std::string& text, std::size_t n, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::size_t end = comma == std::string::npos ? text.size() : comma;
        out.push_back(parse_double(std::string_view(text).substr(pos, end - pos), what));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.size() != n)
        throw ParseError(std::string(what) + ": expected " + std::to_string(n) +
                             " comma-separated numbers",
                         0);
    return out;
}

// Step precedence: --step flag, then KSUB_STEP, then the command default.
double resolve_step(double flag_value, double fallback) {
    if (flag_value > 0.0) return flag_value;
    if (const char* env = std::getenv("KSUB_STEP")) {
        const double v = parse_double(env, "KSUB_STEP");
        if (v <= 0.0) throw ParseError("KSUB_STEP must be positive", 0);
        return v;
    }
    return fallback;
}

// Interior sampling box for the classifier: the whole plane is probed on
// [-2,2]^2, disks on the square inscribed in their 0.8-scaled radius, and
// rectangles with a 5% inset.
std::vector<std::array<double, 2>> classify_grid(const Domain& d, int n) {
    double x0, x1, y0, y1;
    switch (d.kind) {
        case DomainKind::Disk: {
            const double h = 0.8 * d.radius / std::sqrt(2.0);
            x0 = y0 = -h;
            x1 = y1 = h;
            break;
        }
        case DomainKind::Rect: {
            const double mx = 0.05 * (d.x1 - d.x0), my = 0.05 * (d.y1 - d.y0);
            x0 = d.x0 + mx;
            x1 = d.x1 - mx;
            y0 = d.y0 + my;
            y1 = d.y1 - my;
            break;
        }
        case DomainKind::FullPlane:
        default:
            x0 = y0 = -2.0;
            x1 = y1 = 2.0;
            break;
    }
    std::vector<std::array<double, 2>> grid;
    grid.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            grid.push_back({x0 + (x1 - x0) * i / (n - 1), y0 + (y1 - y0) * j / (n - 1)});
    return grid;
}

int cmd_curvature(const std::string& model_path, const std::string& point_str,
                  const std::string& normal_str) {
    KillingModel m = build_model(load_model_file(model_path));
    const auto p = parse_components(point_str, 3, "--point");
    const Point3 pt{p[0], p[1], p[2]};
    if (!m.surface().contains(pt.x, pt.y))
        throw DomainError("point outside the model domain");
    std::string out = "{\"K_M\":" + format_double(m.surface().gaussian_curvature(pt.x, pt.y)) +
                      ",\"tau\":" + format_double(m.bundle_curvature(pt.x, pt.y)) +
                      ",\"scalar\":" + format_double(scalar_curvature(m, pt));
    if (!normal_str.empty()) {
        const auto nn = parse_components(normal_str, 3, "--plane-normal");
        out += ",\"sectional\":" +
               format_double(sectional(m, plane_from_normal(m, pt, Vec3{nn[0], nn[1], nn[2]})));
    }
    std::printf("%s}\n", out.c_str());
    return 0;
}

int cmd_geodesic(const std::string& model_path, const std::string& start_str, double theta,
                 double mu, double length, double step_flag) {
    KillingModel m = build_model(load_model_file(model_path));
    const auto s = parse_components(start_str, 3, "--start");
    GeodesicRun run = geodesic_run(m, {s[0], s[1], s[2]}, theta, mu, length,
                                   resolve_step(step_flag, 1e-3));
    write_geodesic_csv(std::cout, run);
    if (run.exited) {
        std::fprintf(stderr,
                     "{\"error\":\"geodesic left the domain\",\"code\":4,\"exit_time\":%s}\n",
                     format_double(run.exit_time).c_str());
        return 4;
    }
    return 0;
}

int cmd_lift(const std::string& model_path, const std::string& center_str, double radius,
             double z0, double step_flag) {
    KillingModel m = build_model(load_model_file(model_path));
    const auto c = parse_components(center_str, 2, "--center");
    if (radius <= 0.0) throw ParseError("--radius must be positive", 0);
    Path3 path = horizontal_lift(m, circle_curve(c[0], c[1], radius).curve, z0,
                                 resolve_step(step_flag, 1e-4));
    write_path_csv(std::cout, path);
    return 0;
}

int cmd_holonomy(const std::string& model_path, const std::string& center_str, double radius,
                 double step_flag) {
    KillingModel m = build_model(load_model_file(model_path));
    const auto c = parse_components(center_str, 2, "--center");
    if (radius <= 0.0) throw ParseError("--radius must be positive", 0);
    ClosedCurve2 circle = circle_curve(c[0], c[1], radius);
    const double gap = holonomy_gap(m, circle, resolve_step(step_flag, 1e-4));
    const double rhs = 2.0 * std::abs(tau_disk_integral(m, *circle.enclosed));
    std::printf("{\"gap\":%s,\"two_tau_integral\":%s,\"residual\":%s}\n",
                format_double(gap).c_str(), format_double(rhs).c_str(),
                format_double(std::abs(gap - rhs)).c_str());
    return 0;
}

int cmd_classify(const std::string& model_path, int n, double tol) {
    if (n < 5) throw ParseError("--grid must be at least 5", 0);
    KillingModel m = build_model(load_model_file(model_path));
    const auto grid = classify_grid(m.surface().domain(), n);
    const HomogeneityResult h = classify_homogeneous(m, grid, tol);
    std::string out;
    if (h.homogeneous) {
        out = "{\"result\":\"ECK\",\"kappa\":" + format_double(h.kappa_mean) +
              ",\"tau\":" + format_double(h.tau_mean);
    } else {
        out = "{\"result\":\"non-homogeneous\"";
    }
    out += ",\"kappa_range\":" + format_double(h.kappa_range) +
           ",\"tau_range\":" + format_double(h.tau_range) + "}";
    std::printf("%s\n", out.c_str());
    return 0;
}

int cmd_eta(const std::string& model_path, const std::string& point_str) {
    KillingModel m = build_model(load_model_file(model_path));
    const auto p = parse_components(point_str, 2, "--point");
    if (!m.surface().contains(p[0], p[1]))
        throw DomainError("point outside the model domain");
    const ScalarField eta = eta_field(m.surface(), m.tau_field());
    const double e = eta(p[0], p[1]);
    const double lam = m.surface().lambda()(p[0], p[1]);
    std::printf("{\"eta\":%s,\"a\":%s,\"b\":%s}\n", format_double(e).c_str(),
                format_double(-e * p[1] / lam).c_str(), format_double(e * p[0] / lam).c_str());
    return 0;
}

int cmd_verify(const std::string& suite) {
    std::vector<SuiteResult> results;
    if (suite == "all")
        for (const auto& name : suite_names()) results.push_back(run_suite(name));
    else
        results.push_back(run_suite(suite));
    std::printf("%s\n", verify_report_json(results).c_str());
    for (const auto& r : results)
        if (!r.passed()) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for Killing submersions over planar domains"};
    app.require_subcommand(1);

    std::string model_path, point_str, normal_str, start_str, center_str, suite = "all";
    double theta = 0.0, mu = 0.0, length = 1.0, radius = 0.0, z0 = 0.0, step = 0.0, tol = 1e-6;
    int grid_n = 15;

    auto* curvature = app.add_subcommand("curvature", "Curvatures at a point");
    curvature->add_option("model", model_path, "model descriptor JSON file")->required();
    curvature->add_option("--point", point_str, "evaluation point x,y,z")->required();
    curvature->add_option("--plane-normal", normal_str,
                          "also report the sectional curvature of the plane with this normal");

    auto* geodesic = app.add_subcommand("geodesic", "Integrate a geodesic, CSV to stdout");
    geodesic->add_option("model", model_path, "model descriptor JSON file")->required();
    geodesic->add_option("--start", start_str, "start point x,y,z")->required();
    geodesic->add_option("--theta", theta, "initial heading of the projection")->required();
    geodesic->add_option("--mu", mu, "vertical slope")->required();
    geodesic->add_option("--length", length, "parameter length (projected arc length)")
        ->required();
    geodesic->add_option("--step", step, "integration step (default 1e-3)");

    auto* lift = app.add_subcommand("lift", "Horizontal lift of a circle, CSV to stdout");
    lift->add_option("model", model_path, "model descriptor JSON file")->required();
    lift->add_option("--center", center_str, "circle center cx,cy")->required();
    lift->add_option("--radius", radius, "circle radius")->required();
    lift->add_option("--z0", z0, "starting height (default 0)");
    lift->add_option("--step", step, "integration step (default 1e-4)");

    auto* holonomy = app.add_subcommand("holonomy", "Holonomy gap of a circle");
    holonomy->add_option("model", model_path, "model descriptor JSON file")->required();
    holonomy->add_option("--center", center_str, "circle center cx,cy")->required();
    holonomy->add_option("--radius", radius, "circle radius")->required();
    holonomy->add_option("--step", step, "integration step (default 1e-4)");

    auto* classify = app.add_subcommand("classify", "Homogeneity test on a sample grid");
    classify->add_option("model", model_path, "model descriptor JSON file")->required();
    classify->add_option("--grid", grid_n, "grid size n (n x n interior samples, default 15)");
    classify->add_option("--tol", tol, "constancy tolerance (default 1e-6)");

    auto* eta = app.add_subcommand("eta", "Gauge potential at a point");
    eta->add_option("model", model_path, "model descriptor JSON file")->required();
    eta->add_option("--point", point_str, "evaluation point x,y")->required();

    auto* verify = app.add_subcommand("verify", "Run the property suites");
    std::vector<std::string> suite_choices{"all"};
    for (const auto& n : suite_names()) suite_choices.push_back(n);
    verify->add_option("--suite", suite, "suite to run (default all)")
        ->check(CLI::IsMember(suite_choices));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(e.what(), 2);
    }

    try {
        if (app.got_subcommand(curvature)) return cmd_curvature(model_path, point_str, normal_str);
        if (app.got_subcommand(geodesic))
            return cmd_geodesic(model_path, start_str, theta, mu, length, step);
        if (app.got_subcommand(lift)) return cmd_lift(model_path, center_str, radius, z0, step);
        if (app.got_subcommand(holonomy))
            return cmd_holonomy(model_path, center_str, radius, step);
        if (app.got_subcommand(classify)) return cmd_classify(model_path, grid_n, tol);
        if (app.got_subcommand(eta)) return cmd_eta(model_path, point_str);
        if (app.got_subcommand(verify)) return cmd_verify(suite);
    } catch (const ParseError& e) {
        return fail(e.what(), 2);
    } catch (const DomainError& e) {
        return fail(e.what(), 3);
    } catch (const EvalError& e) {
        return fail(e.what(), 3);
    } catch (const IntegrationError& e) {
        return fail(e.what(), 3);
    } catch (const std::invalid_argument& e) {
        return fail(e.what(), 3);
    } catch (const std::exception& e) {
        return fail(e.what(), 1);
    }
    return fail("no command given", 2);
}
