#include "stieltjes/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "stieltjes/bounds.hpp"
#include "stieltjes/io.hpp"

namespace stieltjes {

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;

// Writes to `path`, or to `fallback` when path is empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback)
    {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw InputError("cannot write '" + path + "'");
            out_ = &file_;
        }
    }
    std::ostream& operator*() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

cplx parse_complex(const std::string& text)
{
    const auto comma = text.find(',');
    try {
        std::size_t used = 0;
        if (comma == std::string::npos) {
            const double re = std::stod(text, &used);
            if (used != text.size())
                throw std::invalid_argument(text);
            return {re, 0.0};
        }
        const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
        const double re = std::stod(a, &used);
        if (used != a.size())
            throw std::invalid_argument(text);
        const double im = std::stod(b, &used);
        if (used != b.size())
            throw std::invalid_argument(text);
        return {re, im};
    } catch (const std::logic_error&) {
        throw InputError("expected a complex number as re,im, got '" + text + "'");
    }
}

std::string csv_complex(cplx z)
{
    return format_double(z.real()) + ',' + format_double(z.imag());
}

json load_json(const std::string& path)
{
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw InputError(path + ": invalid JSON: " + e.what());
    }
}

struct FitFlags {
    std::string input;
    std::string format;
    std::string out;
    std::string caprini;
    int max_augment = FitOptions{}.max_augment;
    int max_datafix = FitOptions{}.max_datafix;
    double tol_cert = FitOptions{}.tol_cert;

    FitOptions options() const
    {
        FitOptions o;
        o.max_augment = max_augment;
        o.max_datafix = max_datafix;
        o.tol_cert = tol_cert;
        return o;
    }
};

void add_fit_flags(CLI::App* c, FitFlags& f)
{
    c->add_option("input", f.input, "EIS CSV (freq_hz,re_z,im_z) or sample JSON")->required();
    c->add_option("--format", f.format, "Input format; by default taken from the extension")
        ->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--max-augment", f.max_augment, "Basis augmentation rounds")->check(CLI::NonNegativeNumber);
    c->add_option("--max-datafix", f.max_datafix, "Alternative-data rounds")->check(CLI::NonNegativeNumber);
    c->add_option("--tol-cert", f.tol_cert, "Relative certificate tolerance")->check(CLI::PositiveNumber);
}

void print_messages(const FitResult& r, std::ostream& err)
{
    for (const auto& m : r.diagnostics.messages)
        err << "note: " << m << '\n';
}

int cmd_fit(const FitFlags& f, std::ostream& out, std::ostream& err)
{
    const LoadedInput in = load_input(f.input, f.format);
    const FitResult r = fit(in.samples, f.options());
    {
        Sink sink(f.out, out);
        *sink << fit_report(r, in.kind).dump(2) << '\n';
    }
    if (!f.caprini.empty()) {
        Sink sink(f.caprini, out);
        write_caprini_csv(*sink, r.certificate);
    }
    print_messages(r, err);
    if (!r.certified()) {
        err << "fit not certified: min C = " << format_double(r.certificate.min_value)
            << ", tolerance " << format_double(r.certificate.tol * r.certificate.scale) << '\n';
        return kExitFailed;
    }
    return kExitOk;
}

int cmd_eval(const std::string& report, const std::vector<std::string>& points, const std::string& grid,
             const std::string& out_path, std::ostream& out, std::ostream& err)
{
    const json j = load_json(report);
    if (!j.is_object() || !j.contains("chain"))
        throw InputError(report + ": not a fit report (no chain)");
    const InterpolantChain chain = chain_from_json(j.at("chain"));
    const bool have_rational = j.contains("rational") && !j.at("rational").is_null();
    RationalStieltjes rational;
    if (have_rational)
        rational = rational_from_json(j.at("rational"));
    else
        err << "note: report has no rational representation; those columns are nan\n";
    const InputKind kind = j.value("input_kind", "samples") == "eis" ? InputKind::Eis : InputKind::Samples;

    std::vector<cplx> nodes;
    for (const auto& p : points)
        nodes.push_back(parse_complex(p));
    if (!grid.empty())
        for (double x : parse_grid(grid).points())
            nodes.push_back(grid_node(x, kind));
    if (nodes.empty())
        throw InputError("eval needs --points or --grid");

    Sink sink(out_path, out);
    *sink << "re_z,im_z,re_chain,im_chain,re_rational,im_rational,rel_diff\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (cplx z : nodes) {
        const cplx c = eval_chain(chain, z);
        cplx r(nan, nan);
        if (have_rational) {
            try {
                r = rational(z);
            } catch (const PoleError&) {
            }
        }
        const double diff = std::abs(c - r) / std::max(std::abs(c), std::numeric_limits<double>::min());
        *sink << csv_complex(z) << ',' << csv_complex(c) << ',' << csv_complex(r) << ',' << format_double(diff)
              << '\n';
    }
    return kExitOk;
}

int cmd_feasibility(const std::string& input, const std::string& format, double tol, std::ostream& out)
{
    const LoadedInput in = load_input(input, format);
    const FeasibilityReport f = feasibility(in.samples, tol);
    out << "lambda_min_N," << format_double(f.lambda_min_N) << '\n'
        << "lambda_min_P," << format_double(f.lambda_min_P) << '\n'
        << "scale_N," << format_double(f.scale_N) << '\n'
        << "scale_P," << format_double(f.scale_P) << '\n'
        << "tolerance," << format_double(f.tolerance) << '\n'
        << "feasible," << (f.feasible ? "true" : "false") << '\n';
    return f.feasible ? kExitOk : kExitFailed;
}

void write_circle(std::ostream& out, std::size_t index, cplx z, const char* curve, const Disk& d, int npoints)
{
    for (int k = 0; k <= npoints; ++k) {
        const double a = 2.0 * std::numbers::pi * k / npoints;
        out << index << ',' << csv_complex(z) << ',' << curve << ',' << k << ','
            << csv_complex(d.center + std::polar(d.radius, a)) << '\n';
    }
}

int cmd_bounds(const std::string& input, const std::string& format, const std::vector<std::string>& zs,
               int npoints, const std::string& out_path, std::ostream& out, std::ostream& err)
{
    const LoadedInput in = load_input(input, format);
    Sink sink(out_path, out);
    *sink << "index,re_z,im_z,curve,k,re,im\n";
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const cplx z = parse_complex(zs[i]);
        if (!(z.imag() > 0.0))
            throw InputError("bounds point must lie in the upper half-plane: '" + zs[i] + "'");
        const AdmissibleLens lens = admissible_lens(in.samples, z, npoints);
        write_circle(*sink, i, z, "disk_N", lens.diskN, npoints);
        write_circle(*sink, i, z, "disk_P", lens.diskP, npoints);
        if (lens.empty)
            err << "note: empty admissible set at z = " << csv_complex(z) << '\n';
        for (std::size_t k = 0; k < lens.boundary.size(); ++k)
            *sink << i << ',' << csv_complex(z) << ",lens," << k << ',' << csv_complex(lens.boundary[k]) << '\n';
    }
    return kExitOk;
}

int cmd_band(const FitFlags& f, const std::string& grid, int realizations, std::uint64_t seed, unsigned threads,
             std::ostream& out, std::ostream& err)
{
    const LoadedInput in = load_input(f.input, f.format);
    const FitResult r = fit(in.samples, f.options());
    if (!r.certified())
        err << "note: central fit not certified; band computed anyway\n";
    const std::vector<double> x = parse_grid(grid).points();
    std::vector<cplx> nodes;
    for (double v : x)
        nodes.push_back(grid_node(v, in.kind));
    BandOptions bo;
    bo.realizations = realizations;
    bo.seed = seed;
    bo.threads = threads;
    const UncertaintyBand b = band(in.samples, r, nodes, bo);
    Sink sink(f.out, out);
    write_band_csv(*sink, x, b, in.kind);
    if (b.failed > 0 || b.uncertified > 0)
        err << "note: " << b.failed << " refits failed, " << b.uncertified << " uncertified\n";
    return kExitOk;
}

struct SynthFlags {
    std::string model = "dhn";
    std::vector<std::string> params;
    double fmin = 1e-4;
    double fmax = 1e6;
    int n = 20;
    double noise = 0.01;
    std::uint64_t seed = 1;
    std::string out;
};

ImpedanceModel build_model(const SynthFlags& s)
{
    std::map<std::string, double> p;
    if (s.model == "dhn")
        p = {{"R_inf", 20.0}, {"R0", 50.0}, {"phi", 0.5}, {"psi", 0.8}, {"tau1", 20.0}, {"tau2", 0.001}};
    else if (s.model == "hn")
        p = {{"R", 1.0}, {"tau", 1.0}, {"phi", 0.5}, {"psi", 0.8}};
    else
        p = {{"R", 1.0}, {"tau", 1.0}, {"phi", 0.5}};
    for (const auto& kv : s.params) {
        const auto eq = kv.find('=');
        const std::string key = kv.substr(0, eq);
        if (eq == std::string::npos || !p.contains(key)) {
            std::string known;
            for (const auto& [k, v] : p)
                known += (known.empty() ? "" : ", ") + k;
            throw InputError("unknown parameter '" + kv + "' for model " + s.model + " (known: " + known + ")");
        }
        p[key] = parse_complex(kv.substr(eq + 1)).real();
    }
    try {
        if (s.model == "dhn")
            return ImpedanceModel::dhn(p["R_inf"], p["R0"], p["phi"], p["psi"], p["tau1"], p["tau2"]);
        if (s.model == "hn")
            return ImpedanceModel::hn(p["R"], p["tau"], p["phi"], p["psi"]);
        if (s.model == "zarc")
            return ImpedanceModel::zarc(p["R"], p["tau"], p["phi"]);
        return ImpedanceModel::cpe(p["R"], p["tau"], p["phi"]);
    } catch (const DomainError& e) {
        throw InputError(e.what());
    }
}

int cmd_eis_synth(const SynthFlags& s, std::ostream& out)
{
    const ImpedanceModel m = build_model(s);
    EisDataset d;
    try {
        d = synth_dataset(m, s.fmin, s.fmax, s.n, s.noise, s.seed);
    } catch (const DomainError& e) {
        throw InputError(e.what());
    }
    Sink sink(s.out, out);
    write_eis_csv(*sink, d);
    return kExitOk;
}

int cmd_spectrum(const std::string& path, std::ostream& out)
{
    const json j = load_json(path);
    const json* r = &j;
    if (j.is_object() && j.contains("chain")) {
        if (!j.contains("rational") || j.at("rational").is_null())
            throw InputError(path + ": report has no rational representation");
        r = &j.at("rational");
    }
    const VoigtCircuit c = to_voigt(rational_from_json(*r));
    out << "element,R,C\n";
    out << "R_inf," << format_double(c.R_inf) << ",\n";
    if (c.series_C)
        out << "C_series,," << format_double(*c.series_C) << '\n';
    for (std::size_t k = 0; k < c.elements.size(); ++k)
        out << "RC" << k + 1 << ',' << format_double(c.elements[k].R) << ',' << format_double(c.elements[k].C)
            << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Least-squares reconstruction of Stieltjes functions from complex data", "stieltjes"};
    app.require_subcommand(1);

    FitFlags fitf;
    auto* fitc = app.add_subcommand("fit", "Project the data, certify and write the JSON report");
    add_fit_flags(fitc, fitf);
    fitc->add_option("--out", fitf.out, "Report path (default stdout)");
    fitc->add_option("--caprini", fitf.caprini, "Write the final certificate scan t,C to this CSV");

    std::string report, grid, out_path;
    std::vector<std::string> points;
    auto* evalc = app.add_subcommand("eval", "Evaluate chain and rational form of a fit report");
    evalc->add_option("report", report, "Fit report JSON")->required();
    evalc->add_option("--points", points, "Points re,im (repeatable)");
    evalc->add_option("--grid", grid, "Sweep fmin:fmax:n:log|lin along the imaginary axis");
    evalc->add_option("--out", out_path, "CSV path (default stdout)");

    std::string input, format;
    double tol = 1e-10;
    auto* feasc = app.add_subcommand("feasibility", "Check the Pick matrices of the data");
    feasc->add_option("input", input, "Dataset")->required();
    feasc->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    feasc->add_option("--tol", tol, "Relative eigenvalue tolerance")->check(CLI::NonNegativeNumber);

    std::vector<std::string> zs;
    int npoints = 256;
    auto* boundsc = app.add_subcommand("bounds", "Admissible disks and their intersection at extra points");
    boundsc->add_option("input", input, "Dataset")->required();
    boundsc->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    boundsc->add_option("--z", zs, "Point re,im in the upper half-plane (repeatable)")->required();
    boundsc->add_option("--npoints", npoints, "Vertices per polyline")->check(CLI::Range(8, 100000));
    boundsc->add_option("--out", out_path, "CSV path (default stdout)");

    FitFlags bandf;
    int realizations = BandOptions{}.realizations;
    std::uint64_t seed = BandOptions{}.seed;
    unsigned threads = 0;
    auto* bandc = app.add_subcommand("band", "Monte-Carlo uncertainty band of the fit");
    add_fit_flags(bandc, bandf);
    bandc->add_option("--grid", grid, "fmin:fmax:n:log|lin")->required();
    bandc->add_option("--band-realizations", realizations)->check(CLI::PositiveNumber);
    bandc->add_option("--seed", seed);
    bandc->add_option("--threads", threads, "Worker threads (0: all cores)");
    bandc->add_option("--out", bandf.out, "CSV path (default stdout)");

    SynthFlags synth;
    auto* synthc = app.add_subcommand("eis-synth", "Write a synthetic impedance dataset");
    synthc->add_option("--model", synth.model)->check(CLI::IsMember({"cpe", "zarc", "hn", "dhn"}));
    synthc->add_option("--param", synth.params, "key=value model parameter (repeatable)");
    synthc->add_option("--fmin", synth.fmin)->check(CLI::PositiveNumber);
    synthc->add_option("--fmax", synth.fmax)->check(CLI::PositiveNumber);
    synthc->add_option("--n", synth.n)->check(CLI::PositiveNumber);
    synthc->add_option("--noise", synth.noise)->check(CLI::NonNegativeNumber);
    synthc->add_option("--seed", synth.seed);
    synthc->add_option("--out", synth.out, "CSV path (default stdout)");

    std::string spec_path;
    auto* specc = app.add_subcommand("spectrum", "Voigt circuit table of a fit report or rational JSON");
    specc->add_option("file", spec_path)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (fitc->parsed())
            return cmd_fit(fitf, out, err);
        if (evalc->parsed())
            return cmd_eval(report, points, grid, out_path, out, err);
        if (feasc->parsed())
            return cmd_feasibility(input, format, tol, out);
        if (boundsc->parsed())
            return cmd_bounds(input, format, zs, npoints, out_path, out, err);
        if (bandc->parsed())
            return cmd_band(bandf, grid, realizations, seed, threads, out, err);
        if (synthc->parsed())
            return cmd_eis_synth(synth, out);
        if (specc->parsed())
            return cmd_spectrum(spec_path, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const json::exception& e) {
        err << "error: malformed JSON: " << e.what() << '\n';
        return kExitInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailed;
    }
    return kExitInput;
}

}  // namespace stieltjes
