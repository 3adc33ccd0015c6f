#include "halfinv/job.hpp"

#include "halfinv/basis.hpp"
#include "halfinv/errors.hpp"
#include "halfinv/glm.hpp"
#include "halfinv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

namespace halfinv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
    return j.at(key);
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double number(const json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
    return v;
}

std::size_t count_of(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(std::string(what) + " must be a non-negative integer");
    }
    return j.get<std::size_t>();
}

Command parse_command(const std::string& s) {
    if (s == "forward") return Command::Forward;
    if (s == "phi0") return Command::Phi0;
    if (s == "check") return Command::Check;
    if (s == "reconstruct") return Command::Reconstruct;
    if (s == "roundtrip") return Command::Roundtrip;
    if (s == "example") return Command::Example;
    throw ConfigError("unknown command '" + s + "'");
}

Primitive parse_primitive(const json& j, const GridSpec& grid, const fs::path& base) {
    reject_unknown(j, {"type", "gamma", "path"}, "sigma");
    const std::string type = require(j, "type").get<std::string>();
    if (type == "zero") return Primitive::zero();
    if (type == "gamma") {
        const double g = number(require(j, "gamma"), "gamma");
        if (g < 0.0 || g >= 2.0) throw ConfigError("gamma must lie in [0, 2)");
        return Primitive::example_gamma(g);
    }
    if (type == "samples" || type == "antiderivative") {
        const fs::path p = base / require(j, "path").get<std::string>();
        SampledFunction f = load_samples(p, grid);
        return type == "samples" ? Primitive::sampled(std::move(f))
                                 : Primitive::antiderivative_of(std::move(f));
    }
    throw ConfigError("unknown sigma type '" + type + "'");
}

SpectralSequence parse_spectrum(const json& j) {
    reject_unknown(j, {"head", "harmonic", "tail"}, "spectrum");
    SpectrumTail tail = ExactPiTail{};
    if (j.contains("tail")) {
        const json& t = j.at("tail");
        reject_unknown(t, {"model", "c"}, "tail");
        const std::string model = require(t, "model").get<std::string>();
        if (model == "coulomb") {
            tail = CoulombTail{number(require(t, "c"), "tail.c")};
        } else if (model != "exact_pi") {
            throw ConfigError("unknown tail model '" + model + "'");
        }
    }
    std::vector<double> head;
    if (j.contains("head") == j.contains("harmonic")) {
        throw ConfigError("spectrum needs exactly one of 'head' or 'harmonic'");
    }
    if (j.contains("head")) {
        if (!j.at("head").is_array()) throw ConfigError("spectrum.head must be an array");
        for (const auto& v : j.at("head")) head.push_back(number(v, "spectrum.head entry"));
    } else {
        const auto harmonic = SpectralSequence::harmonic(count_of(j.at("harmonic"), "spectrum.harmonic"));
        head.assign(harmonic.head().begin(), harmonic.head().end());
    }
    try {
        return SpectralSequence(std::move(head), tail);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("spectrum: ") + e.what());
    }
}

BoundaryParam parse_boundary(const json& j) {
    reject_unknown(j, {"type", "h"}, "boundary");
    const std::string type = require(j, "type").get<std::string>();
    if (type == "robin") return Robin{j.contains("h") ? number(j.at("h"), "boundary.h") : 0.0};
    if (type == "dirichlet") return Dirichlet{};
    throw ConfigError("unknown boundary type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Output.

class Csv {
public:
    Csv(const fs::path& path, std::initializer_list<std::string> header) : out_(path) {
        if (!out_) throw ConfigError("cannot write " + path.string());
        bool first = true;
        for (const auto& h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }
    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            out_ << (first ? "" : ",") << format_number(v);
            first = false;
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(finite_or_null(v[i]));
    return a;
}

json to_json(const MembershipReport& r) {
    return json{{"solvable", r.solvable},
                {"marginal", r.marginal},
                {"min_alpha", finite_or_null(r.min_alpha)},
                {"alpha", to_json(r.alpha.head)},
                {"beta", to_json(r.beta.head)},
                {"expansion_residual", finite_or_null(r.expansion_residual)}};
}

void write_samples(const fs::path& path, const char* name, const SampledFunction& f) {
    Csv csv(path, {"x", name});
    for (std::size_t i = 0; i < f.grid().size(); ++i) csv.row({f.grid().node(i), f[i]});
}

GridSpec unit_grid(const JobConfig& c) { return GridSpec(c.grid, 0.0, 1.0); }
GridSpec half_grid(const JobConfig& c) { return GridSpec((c.grid + 1) / 2, 0.0, 0.5); }

const SpectralSequence& spectrum_of(const JobConfig& c) {
    if (!c.spectrum) throw ConfigError("this command needs a 'spectrum'");
    return *c.spectrum;
}

int run_forward(const JobConfig& c, std::ostream& log) {
    const Eigensystem es = eigensystem(c.sigma, c.boundary, c.count, unit_grid(c));
    Csv csv(c.output / "eigenvalues.csv", {"n", "lambda", "alpha"});
    for (Eigen::Index n = 0; n < es.lambdas.size(); ++n) {
        csv.row({static_cast<double>(n), es.lambdas[n], es.alphas[n]});
    }
    log << "forward: " << es.lambdas.size() << " eigenvalues\n";
    return kExitOk;
}

SampledFunction phi0_of(const JobConfig& c) {
    return phi0(c.sigma, half_kernel(c.sigma, half_grid(c), c.kernel));
}

int run_phi0(const JobConfig& c, std::ostream& log) {
    const SampledFunction p = phi0_of(c);
    write_samples(c.output / "phi0.csv", "phi0", p);
    log << "phi0: " << p.grid().size() << " samples\n";
    return kExitOk;
}

int run_check(const JobConfig& c, std::ostream& log) {
    const SpectralSequence& spectrum = spectrum_of(c);
    const std::size_t m = c.truncation.value_or(default_truncation(spectrum));
    const MembershipReport report = membership_check(phi0_of(c), spectrum, m);
    const RegularityFit fit = regularity_diagnostic(report, spectrum);
    json j = to_json(report);
    j["truncation"] = m;
    j["regularity"] = {{"verdict", fit.verdict == Regularity::ConsistentWithW21 ? "consistent" : "inconclusive"},
                       {"c", fit.c},
                       {"residual", fit.residual}};
    if (const auto pot = c.sigma.potential(half_grid(c))) {
        j["local_existence"] = local_existence_check(pot->q, spectrum);
    }
    write_json(c.output / "report.json", j);
    log << "check: " << (report.solvable ? "solvable" : "not solvable")
        << (report.marginal ? " (marginal)" : "") << ", min alpha " << format_number(report.min_alpha) << '\n';
    return report.solvable ? kExitOk : kExitUnsolvable;
}

int run_reconstruct(const JobConfig& c, std::ostream& log, bool roundtrip) {
    const SpectralSequence& spectrum = spectrum_of(c);
    if ((c.grid - 1) % 4 != 0) throw ConfigError("reconstruction needs grid = 4m + 1");
    ReconstructionConfig rc;
    rc.grid_points = c.grid;
    rc.truncation = c.truncation;
    rc.kernel = c.kernel;
    rc.roundtrip = roundtrip;
    try {
        const ReconstructionResult r = reconstruct(c.sigma, spectrum, rc);
        write_samples(c.output / "sigma.csv", "sigma", r.sigma);
        const auto& d = r.diagnostics;
        json j{{"h", r.h},
               {"diagnostics",
                {{"glm_residual", d.glm_residual},
                 {"positivity_margin", d.positivity_margin},
                 {"h_spread", d.h_spread},
                 {"expansion_residual", d.expansion_residual}}},
               {"report", to_json(r.report)}};
        if (roundtrip) {
            j["diagnostics"]["roundtrip_spectrum_error"] = *d.roundtrip_spectrum_error;
            Csv csv(c.output / "roundtrip.csv", {"n", "target", "lambda", "error"});
            const Vector& got = *r.roundtrip_lambdas;
            for (Eigen::Index n = 0; n < got.size(); ++n) {
                const double target = spectrum[static_cast<std::size_t>(n)];
                csv.row({static_cast<double>(n), target, got[n], got[n] - target});
            }
        }
        write_json(c.output / "result.json", j);
        log << (roundtrip ? "roundtrip" : "reconstruct") << ": h = " << format_number(r.h);
        if (roundtrip) log << ", max spectrum error " << format_number(*d.roundtrip_spectrum_error);
        log << '\n';
        return kExitOk;
    } catch (const Unsolvable& u) {
        json j = to_json(u.report());
        j["reason"] = u.what();
        j["positivity_margin"] = finite_or_null(u.positivity_margin());
        write_json(c.output / "report.json", j);
        log << "unsolvable: " << u.what() << '\n';
        return kExitUnsolvable;
    }
}

int run_example(const JobConfig& c, std::ostream& log) {
    const double g = c.gamma;
    const oracle::GammaFamily family(g);
    const bool solvable = family.solvable();
    // sigma is defined on [0,1] only below the solvability boundary
    const GridSpec grid = solvable ? unit_grid(c) : half_grid(c);
    write_samples(c.output / "sigma.csv", "sigma",
                  SampledFunction::from(grid, [g](double x) { return oracle::sigma_gamma(g, x); }));
    json j{{"gamma", g},
           {"solvable", solvable},
           {"phi0", oracle::phi0_gamma(g)},
           {"alpha0", (1.0 - g) / 2.0},
           {"kernel_at_1_0", solvable ? json(oracle::kernel_gamma(g, 1.0, 0.0)) : json(nullptr)}};
    if (solvable) {
        j["h"] = oracle::h_gamma(g);
        std::ofstream out(c.output / "eigenfunctions.csv");
        if (!out) throw ConfigError("cannot write eigenfunctions.csv");
        out << 'x';
        for (std::size_t n = 0; n < c.count; ++n) out << ",w" << n;
        out << '\n';
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out << format_number(grid.node(i));
            for (std::size_t n = 0; n < c.count; ++n) {
                out << ',' << format_number(oracle::eigenfunction_gamma(g, n, grid.node(i)));
            }
            out << '\n';
        }
    }
    write_json(c.output / "example.json", j);
    log << "example: gamma = " << format_number(g) << (solvable ? ", solvable\n" : ", not solvable\n");
    return kExitOk;
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";
    // round to 12 significant digits first, then print without an exponent
    char buf[400];
    std::snprintf(buf, sizeof buf, "%.11e", value);
    const double rounded = std::strtod(buf, nullptr);
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(rounded))));
    const int decimals = std::clamp(11 - exponent, 0, 330);
    std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

SampledFunction load_samples(const fs::path& path, const GridSpec& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read sample file " + path.string());
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double x = 0.0;
        double y = 0.0;
        if (!(fields >> x >> y)) {
            if (xs.empty() && line_no == 1) continue;  // header
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected two numbers");
        }
        if (!xs.empty() && !(x > xs.back())) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": x must increase strictly");
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    if (xs.size() < 2) throw ConfigError(path.string() + ": need at least two samples");
    const double tol = 1e-12 * (1.0 + std::abs(grid.upper()));
    if (xs.front() > grid.lower() + tol || xs.back() < grid.upper() - tol) {
        throw ConfigError(path.string() + ": samples do not cover [" + format_number(grid.lower()) + ", " +
                          format_number(grid.upper()) + "]");
    }
    return SampledFunction::from(grid, [&](double x) {
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - xs.begin(), 1,
                                                                         static_cast<std::ptrdiff_t>(xs.size() - 1)));
        const double t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
        return ys[hi - 1] + t * (ys[hi] - ys[hi - 1]);
    });
}

JobConfig parse_config(const json& j, const fs::path& base_dir) {
    try {
        reject_unknown(j,
                       {"command", "sigma", "sigma0", "spectrum", "boundary", "count", "grid", "truncation",
                        "kernel", "gamma", "output"},
                       "config");
        JobConfig c;
        c.command = parse_command(require(j, "command").get<std::string>());
        if (j.contains("grid")) c.grid = count_of(j.at("grid"), "grid");
        if (c.grid < 5 || c.grid % 2 == 0) throw ConfigError("grid must be an odd integer >= 5");
        if (j.contains("count")) c.count = count_of(j.at("count"), "count");
        if (j.contains("truncation")) {
            c.truncation = count_of(j.at("truncation"), "truncation");
            if (*c.truncation == 0) throw ConfigError("truncation must be positive");
        }
        if (j.contains("kernel")) {
            const std::string k = j.at("kernel").get<std::string>();
            if (k == "collocation") {
                c.kernel = KernelMethod::Collocation;
            } else if (k == "goursat") {
                c.kernel = KernelMethod::Goursat;
            } else {
                throw ConfigError("unknown kernel method '" + k + "'");
            }
        }
        if (j.contains("gamma")) c.gamma = number(j.at("gamma"), "gamma");
        if (j.contains("output")) c.output = j.at("output").get<std::string>();
        if (j.contains("spectrum")) c.spectrum = parse_spectrum(j.at("spectrum"));
        if (j.contains("boundary")) c.boundary = parse_boundary(j.at("boundary"));

        const bool on_unit = c.command == Command::Forward;
        const char* key = on_unit ? "sigma" : "sigma0";
        const char* other = on_unit ? "sigma0" : "sigma";
        if (j.contains(other)) throw ConfigError(std::string("use '") + key + "' for this command");
        if (j.contains(key)) {
            c.sigma = parse_primitive(j.at(key), on_unit ? unit_grid(c) : half_grid(c), base_dir);
        } else if (c.command != Command::Example) {
            throw ConfigError(std::string("missing key '") + key + "'");
        }
        if (c.command == Command::Example && (c.gamma < 0.0 || c.gamma >= 2.0)) {
            throw ConfigError("gamma must lie in [0, 2)");
        }
        if (c.command == Command::Example && !j.contains("count")) c.count = 5;
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

int run_job(const JobConfig& c, std::ostream& log) {
    std::error_code ec;
    fs::create_directories(c.output, ec);
    if (ec) throw ConfigError("cannot create output directory " + c.output.string() + ": " + ec.message());
    switch (c.command) {
        case Command::Forward:
            return run_forward(c, log);
        case Command::Phi0:
            return run_phi0(c, log);
        case Command::Check:
            return run_check(c, log);
        case Command::Reconstruct:
            return run_reconstruct(c, log, false);
        case Command::Roundtrip:
            return run_reconstruct(c, log, true);
        case Command::Example:
            return run_example(c, log);
    }
    return kExitConfig;
}

int run_job(const json& j, const fs::path& base_dir, std::ostream& log, std::ostream& err) {
    try {
        return run_job(parse_config(j, base_dir), log);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical failure (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace halfinv
