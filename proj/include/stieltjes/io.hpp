#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "stieltjes/core.hpp"
#include "stieltjes/eis.hpp"
#include "stieltjes/fit.hpp"
#include "stieltjes/interp.hpp"
#include "stieltjes/uncertainty.hpp"

namespace stieltjes {

// Malformed or unreadable input file.
class InputError : public Error {
public:
    using Error::Error;
};

inline constexpr int kReportSchemaVersion = 1;

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// EIS CSV: header freq_hz,re_z,im_z then one row per frequency.
EisDataset parse_eis_csv(std::istream& in, const std::string& name = "input");
EisDataset read_eis_csv(const std::string& path);
void write_eis_csv(std::ostream& out, const EisDataset& d);

// Sample JSON: [{"z":[re,im],"w":[re,im]}, ...].
SampleSet parse_samples_json(const std::string& text, const std::string& name = "input");
SampleSet read_samples_json(const std::string& path);

enum class InputKind { Eis, Samples };

struct LoadedInput {
    InputKind kind = InputKind::Samples;
    SampleSet samples;
};

// Format chosen by `format` ("csv", "json") or, when empty, by the extension.
LoadedInput load_input(const std::string& path, const std::string& format = "");

std::string read_file(const std::string& path);

nlohmann::json to_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RationalStieltjes& f);
RationalStieltjes rational_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InterpolantChain& c);
InterpolantChain chain_from_json(const nlohmann::json& j);
nlohmann::json to_json(const VoigtCircuit& c);

nlohmann::json fit_report(const FitResult& r, InputKind kind);

// t,C rows of the final certificate scan.
void write_caprini_csv(std::ostream& out, const CapriniCertificate& c);

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    bool log = true;

    std::vector<double> points() const;
};

// "fmin:fmax:n:log" or "fmin:fmax:n:lin".
GridSpec parse_grid(const std::string& text);

// Node for grid abscissa x: i 2 pi x for EIS input (x in Hz), i x otherwise.
cplx grid_node(double x, InputKind kind);

// x,re_lo,re_hi,im_lo,im_hi,re_min,re_max,im_min,im_max. For EIS input the
// values are impedances Z = conj(f).
void write_band_csv(std::ostream& out, const std::vector<double>& x, const UncertaintyBand& b, InputKind kind);

}  // namespace stieltjes
