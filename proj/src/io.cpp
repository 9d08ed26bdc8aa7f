#include "stieltjes/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace stieltjes {

using nlohmann::json;

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep)
        out.push_back("");
    return out;
}

bool parse_number(const std::string& s, double& v)
{
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+')
        ++b;
    const auto res = std::from_chars(b, e, v);
    return res.ec == std::errc() && res.ptr == e && std::isfinite(v);
}

std::string extension(const std::string& path)
{
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return "";
    std::string ext = path.substr(dot + 1);
    for (char& c : ext)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

json pair(double a, double b)
{
    return json::array({a, b});
}

double number_at(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_number())
        throw InputError(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

}  // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

EisDataset parse_eis_csv(std::istream& in, const std::string& name)
{
    EisDataset d;
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (!header) {
            if (t != "freq_hz,re_z,im_z") {
                std::ostringstream msg;
                msg << name << ":" << lineno << ": expected header 'freq_hz,re_z,im_z', got '" << t << "'";
                throw InputError(msg.str());
            }
            header = true;
            continue;
        }
        const auto fields = split(t, ',');
        double f, re, im;
        if (fields.size() != 3 || !parse_number(fields[0], f) || !parse_number(fields[1], re) ||
            !parse_number(fields[2], im)) {
            std::ostringstream msg;
            msg << name << ":" << lineno << ": malformed row '" << t << "' (expected three numbers)";
            throw InputError(msg.str());
        }
        if (!(f > 0.0)) {
            std::ostringstream msg;
            msg << name << ":" << lineno << ": frequency must be positive";
            throw InputError(msg.str());
        }
        if (!d.frequencies.empty() && !(f > d.frequencies.back())) {
            std::ostringstream msg;
            msg << name << ":" << lineno << ": frequencies must be strictly increasing";
            throw InputError(msg.str());
        }
        d.frequencies.push_back(f);
        d.impedances.emplace_back(re, im);
    }
    if (!header)
        throw InputError(name + ": empty file (expected header 'freq_hz,re_z,im_z')");
    if (d.frequencies.empty())
        throw InputError(name + ": no data rows");
    return d;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

EisDataset read_eis_csv(const std::string& path)
{
    std::istringstream in(read_file(path));
    return parse_eis_csv(in, path);
}

void write_eis_csv(std::ostream& out, const EisDataset& d)
{
    out << "freq_hz,re_z,im_z\n";
    for (std::size_t j = 0; j < d.frequencies.size(); ++j)
        out << format_double(d.frequencies[j]) << ',' << format_double(d.impedances[j].real()) << ','
            << format_double(d.impedances[j].imag()) << '\n';
}

SampleSet parse_samples_json(const std::string& text, const std::string& name)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(name + ": invalid JSON: " + e.what());
    }
    if (!j.is_array() || j.empty())
        throw InputError(name + ": expected a non-empty array of {\"z\":[re,im],\"w\":[re,im]}");
    std::vector<ComplexSample> v;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const json& e = j[k];
        try {
            if (!e.is_object() || !e.contains("z") || !e.contains("w"))
                throw InputError("expected an object with fields z and w");
            v.push_back({complex_from_json(e.at("z")), complex_from_json(e.at("w"))});
        } catch (const Error& err) {
            std::ostringstream msg;
            msg << name << ": sample " << k << ": " << err.what();
            throw InputError(msg.str());
        }
    }
    try {
        return SampleSet(std::move(v));
    } catch (const DomainError& e) {
        throw InputError(name + ": " + e.what());
    }
}

SampleSet read_samples_json(const std::string& path)
{
    return parse_samples_json(read_file(path), path);
}

LoadedInput load_input(const std::string& path, const std::string& format)
{
    const std::string f = format.empty() ? extension(path) : format;
    LoadedInput li;
    if (f == "csv") {
        li.kind = InputKind::Eis;
        try {
            li.samples = to_samples(read_eis_csv(path));
        } catch (const InputError&) {
            throw;
        } catch (const DomainError& e) {
            throw InputError(path + ": " + e.what());
        }
    } else if (f == "json") {
        li.kind = InputKind::Samples;
        li.samples = read_samples_json(path);
    } else {
        throw InputError("cannot tell the format of '" + path + "'; use --format csv|json");
    }
    return li;
}

json to_json(cplx z)
{
    return pair(z.real(), z.imag());
}

cplx complex_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError("expected a complex number as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const RationalStieltjes& f)
{
    json poles = json::array();
    for (const Pole& p : f.poles())
        poles.push_back(pair(p.t, p.sigma));
    return {{"gamma", f.gamma()}, {"sigma0", f.sigma0()}, {"poles", poles}};
}

RationalStieltjes rational_from_json(const json& j)
{
    if (!j.is_object())
        throw InputError("rational function must be an object with gamma, sigma0 and poles");
    const double gamma = j.contains("gamma") ? number_at(j, "gamma") : 0.0;
    const double sigma0 = j.contains("sigma0") ? number_at(j, "sigma0") : 0.0;
    std::vector<Pole> poles;
    if (j.contains("poles")) {
        const json& p = j.at("poles");
        if (!p.is_array())
            throw InputError("poles must be an array of [t, sigma]");
        for (const json& e : p) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw InputError("each pole must be [t, sigma]");
            poles.push_back({e[0].get<double>(), e[1].get<double>()});
        }
    }
    try {
        return RationalStieltjes(gamma, sigma0, std::move(poles));
    } catch (const DomainError& e) {
        throw InputError(std::string("invalid rational function: ") + e.what());
    }
}

json to_json(const InterpolantChain& c)
{
    json steps = json::array();
    for (const StepParams& s : c.steps)
        steps.push_back({{"tstar", s.tstar},
                         {"sigmastar", s.sigmastar},
                         {"gammastar", s.gammastar},
                         {"sigmaupper", s.sigmaupper},
                         {"node", to_json(s.node)},
                         {"value", to_json(s.value)}});
    json term = to_json(c.terminal);
    term["kind"] = terminal_name(c.terminal_kind);
    return {{"steps", steps}, {"terminal", term}};
}

InterpolantChain chain_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("steps") || !j.contains("terminal"))
        throw InputError("chain must have steps and terminal");
    InterpolantChain c;
    for (const json& s : j.at("steps")) {
        StepParams p;
        p.tstar = number_at(s, "tstar");
        p.sigmastar = number_at(s, "sigmastar");
        p.gammastar = number_at(s, "gammastar");
        p.sigmaupper = number_at(s, "sigmaupper");
        p.node = complex_from_json(s.at("node"));
        p.value = complex_from_json(s.at("value"));
        c.steps.push_back(p);
    }
    const json& t = j.at("terminal");
    c.terminal = rational_from_json(t);
    const std::string kind = t.value("kind", "zero");
    if (kind == "zero")
        c.terminal_kind = TerminalKind::Zero;
    else if (kind == "constant")
        c.terminal_kind = TerminalKind::Constant;
    else if (kind == "pole0")
        c.terminal_kind = TerminalKind::Pole0;
    else if (kind == "early_exit")
        c.terminal_kind = TerminalKind::EarlyExit;
    else
        throw InputError("unknown terminal kind '" + kind + "'");
    return c;
}

json to_json(const VoigtCircuit& c)
{
    json el = json::array();
    for (const auto& e : c.elements)
        el.push_back({{"R", e.R}, {"C", e.C}});
    json j = {{"R_inf", c.R_inf}, {"elements", el}};
    j["series_C"] = c.series_C ? json(*c.series_C) : json(nullptr);
    return j;
}

json fit_report(const FitResult& r, InputKind kind)
{
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["input_kind"] = kind == InputKind::Eis ? "eis" : "samples";
    json samples = json::array();
    for (const auto& s : r.data)
        samples.push_back({{"z", to_json(s.node)}, {"w", to_json(s.value)}});
    j["samples"] = samples;

    auto vec = [](const ComplexVector& v) {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            a.push_back(to_json(v(i)));
        return a;
    };
    j["projected"] = vec(r.projected);
    j["alternative_data"] = vec(r.alternative_data);
    j["dw"] = vec(r.dw);
    double wn = 0.0;
    for (const auto& s : r.data)
        wn += std::norm(s.value);
    j["dw_relative"] = wn > 0.0 ? r.dw.norm() / std::sqrt(wn) : 0.0;
    j["rho"] = r.rho;

    auto cert = [](const CapriniCertificate& c) {
        json minima = json::array();
        for (const auto& m : c.scan.minima)
            minima.push_back(pair(m.location, m.value));
        return json{{"certified", c.certified},
                    {"min_value", c.min_value},
                    {"scale", c.scale},
                    {"tol", c.tol},
                    {"T", c.T},
                    {"T_fallback", c.T_fallback},
                    {"gamma_positive", c.gamma_positive},
                    {"sum_residual_real", c.sum_residual_real},
                    {"support", c.support},
                    {"support_values", c.support_values},
                    {"minima", minima}};
    };
    j["certified"] = r.certified();
    j["certificate"] = cert(r.certificate);
    j["initial_certificate"] = cert(r.initial_certificate);

    json basis = json::array();
    Eigen::Index col = r.basis.includes_constant ? 1 : 0;
    if (r.coefficients.size() > 0 && r.basis.includes_constant)
        basis.push_back({{"kind", "constant"}, {"x", r.coefficients(0)}});
    for (const auto& e : r.basis.elements) {
        const double x = col < r.coefficients.size() ? r.coefficients(col) : 0.0;
        ++col;
        if (x <= 0.0)
            continue;
        if (e.kind == BasisElement::Kind::PointMass)
            basis.push_back({{"kind", "point_mass"}, {"tau", e.s1}, {"x", x}});
        else
            basis.push_back({{"kind", "uniform_density"}, {"s1", e.s1}, {"s2", e.s2}, {"x", x}});
    }
    j["active_basis"] = basis;

    j["chain"] = to_json(r.interpolant);
    if (r.diagnostics.spectrum_ok) {
        j["rational"] = to_json(r.rational);
        if (kind == InputKind::Eis)
            j["voigt"] = to_json(to_voigt(r.rational));
    } else {
        j["rational"] = nullptr;
    }

    const FitDiagnostics& d = r.diagnostics;
    j["diagnostics"] = {{"augment_rounds", d.augment_rounds},
                        {"datafix_rounds", d.datafix_rounds},
                        {"objective_history", d.objective_history},
                        {"reprojections", d.reprojections},
                        {"interpolation_complete", d.interpolation_complete},
                        {"reprojection_change", d.reprojection_change},
                        {"unperturbed_steps", d.unperturbed_steps},
                        {"node_residual", d.node_residual},
                        {"spectrum_ok", d.spectrum_ok},
                        {"messages", d.messages}};
    return j;
}

void write_caprini_csv(std::ostream& out, const CapriniCertificate& c)
{
    out << "t,C\n";
    for (std::size_t i = 0; i < c.scan.grid.size(); ++i)
        out << format_double(c.scan.grid[i]) << ',' << format_double(c.scan.values[i]) << '\n';
}

std::vector<double> GridSpec::points() const
{
    std::vector<double> x;
    for (int i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        x.push_back(log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo));
    }
    if (n > 1) {
        x.front() = lo;
        x.back() = hi;
    }
    return x;
}

GridSpec parse_grid(const std::string& text)
{
    const auto f = split(text, ':');
    GridSpec g;
    double n = 0.0;
    if (f.size() != 4 || !parse_number(f[0], g.lo) || !parse_number(f[1], g.hi) || !parse_number(f[2], n) ||
        (f[3] != "log" && f[3] != "lin"))
        throw InputError("grid must look like fmin:fmax:n:log or fmin:fmax:n:lin, got '" + text + "'");
    g.n = static_cast<int>(n);
    g.log = f[3] == "log";
    if (g.n < 1 || static_cast<double>(g.n) != n)
        throw InputError("grid point count must be a positive integer");
    if (!(g.hi >= g.lo) || (g.log && !(g.lo > 0.0)))
        throw InputError("grid needs 0 < fmin <= fmax (fmin > 0 for log spacing)");
    return g;
}

cplx grid_node(double x, InputKind kind)
{
    return kind == InputKind::Eis ? cplx(0.0, 2.0 * std::numbers::pi * x) : cplx(0.0, x);
}

void write_band_csv(std::ostream& out, const std::vector<double>& x, const UncertaintyBand& b, InputKind kind)
{
    out << "x,re_lo,re_hi,im_lo,im_hi,re_min,re_max,im_min,im_max\n";
    const bool eis = kind == InputKind::Eis;
    for (std::size_t i = 0; i < x.size(); ++i) {
        // Z = conj(f): the imaginary range flips.
        const double im_lo = eis ? -b.im_hi[i] : b.im_lo[i];
        const double im_hi = eis ? -b.im_lo[i] : b.im_hi[i];
        const double im_min = eis ? -b.im_max[i] : b.im_min[i];
        const double im_max = eis ? -b.im_min[i] : b.im_max[i];
        out << format_double(x[i]) << ',' << format_double(b.re_lo[i]) << ',' << format_double(b.re_hi[i]) << ','
            << format_double(im_lo) << ',' << format_double(im_hi) << ',' << format_double(b.re_min[i]) << ','
            << format_double(b.re_max[i]) << ',' << format_double(im_min) << ',' << format_double(im_max) << '\n';
    }
}

}  // namespace stieltjes
