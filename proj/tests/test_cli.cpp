#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "stieltjes/cli.hpp"
#include "stieltjes/io.hpp"

using namespace stieltjes;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch()
{
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("stieltjes_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string write(const std::string& name, const std::string& text)
{
    const fs::path p = scratch() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        if (!line.empty() && line.back() == ',')
            f.push_back("");
        rows.push_back(f);
    }
    return rows;
}

// Noiseless two-element Voigt circuit.
std::string voigt_csv()
{
    const VoigtCircuit v{1.0, std::nullopt, {{3.0, 1e-2}, {2.0, 1e-4}}};
    EisDataset d;
    for (int k = 0; k < 8; ++k) {
        const double hz = std::pow(10.0, -1.0 + 0.7 * k);
        d.frequencies.push_back(hz);
        d.impedances.push_back(v.impedance(2.0 * M_PI * hz));
    }
    std::ostringstream s;
    write_eis_csv(s, d);
    return write("voigt.csv", s.str());
}

std::string sqrt_json(int n)
{
    std::ostringstream s;
    s << '[';
    for (int k = 0; k < n; ++k) {
        const cplx z(std::cos(0.2 + 2.7 * k / (n - 1)), std::sin(0.2 + 2.7 * k / (n - 1)) + 0.2);
        const cplx w = 1.0 / std::sqrt(-z);
        s << (k ? "," : "") << "{\"z\":[" << format_double(z.real()) << ',' << format_double(z.imag())
          << "],\"w\":[" << format_double(w.real()) << ',' << format_double(w.imag()) << "]}";
    }
    s << ']';
    return write("sqrt" + std::to_string(n) + ".json", s.str());
}

}  // namespace

TEST_CASE("usage errors exit with 2")
{
    CHECK(run({}).code == 2);
    CHECK(run({"nope"}).code == 2);
    CHECK(run({"fit"}).code == 2);
    CHECK(run({"eis-synth", "--model", "foo"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("fit: certified noiseless data and malformed input")
{
    const std::string in = voigt_csv();
    const std::string rep = (scratch() / "voigt.json").string();
    const std::string cap = (scratch() / "caprini.csv").string();
    const Run r = run({"fit", in, "--out", rep, "--caprini", cap});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(read_file(rep));
    CHECK(j["certified"] == true);
    CHECK(j["input_kind"] == "eis");
    CHECK(read_file(cap).rfind("t,C\n", 0) == 0);

    const std::string bad = write("bad.csv", "freq_hz,re_z,im_z\n1,2,-3\n10,abc,-1\n");
    const Run b = run({"fit", bad});
    CHECK(b.code == 2);
    CHECK(b.err.find("bad.csv:3:") != std::string::npos);
    CHECK(run({"fit", (scratch() / "missing.csv").string()}).code == 2);
    CHECK(run({"fit", write("x.txt", "")}).code == 2);
    CHECK(run({"fit", in, "--format", "json"}).code == 2);
}

TEST_CASE("eval: chain and rational agree; nodes reproduced; conjugate symmetry")
{
    const std::string in = voigt_csv();
    const std::string rep = (scratch() / "voigt_eval.json").string();
    REQUIRE(run({"fit", in, "--out", rep}).code == 0);
    const auto j = nlohmann::json::parse(read_file(rep));

    const Run g = run({"eval", rep, "--grid", "1e-3:1e7:50:log"});
    REQUIRE(g.code == 0);
    const auto rows = csv_rows(g.out);
    REQUIRE(rows.size() == 51);
    CHECK(rows[0][6] == "rel_diff");
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][6]) <= 1e-6);

    std::vector<std::string> args = {"eval", rep};
    std::vector<cplx> nodes, values;
    for (const auto& s : j["samples"]) {
        nodes.push_back(complex_from_json(s["z"]));
        args.push_back("--points");
        args.push_back(format_double(nodes.back().real()) + "," + format_double(nodes.back().imag()));
    }
    for (const auto& p : j["alternative_data"])
        values.push_back(complex_from_json(p));
    const auto nr = csv_rows(run(args).out);
    REQUIRE(nr.size() == nodes.size() + 1);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const cplx c(std::stod(nr[k + 1][2]), std::stod(nr[k + 1][3]));
        CHECK(std::abs(c - values[k]) <= 1e-8 * std::abs(values[k]));
    }

    const auto sym = csv_rows(run({"eval", rep, "--points", "0.3,2", "--points", "0.3,-2"}).out);
    CHECK(std::stod(sym[1][2]) == doctest::Approx(std::stod(sym[2][2])).epsilon(1e-14));
    CHECK(std::stod(sym[1][3]) == doctest::Approx(-std::stod(sym[2][3])).epsilon(1e-14));

    CHECK(run({"eval", rep}).code == 2);
    CHECK(run({"eval", in}).code == 2);
    CHECK(run({"eval", rep, "--points", "1,x"}).code == 2);
}

TEST_CASE("feasibility")
{
    const Run r = run({"feasibility", sqrt_json(6)});
    CHECK(r.code == 0);
    CHECK(r.out.find("feasible,true") != std::string::npos);
    // Negative imaginary value is not a Stieltjes datum.
    const std::string bad = write("infeasible.json", R"([{"z":[0,1],"w":[1,-1]}])");
    const Run b = run({"feasibility", bad});
    CHECK(b.code == 1);
    CHECK(b.out.find("feasible,false") != std::string::npos);
}

TEST_CASE("bounds writes disks and lens")
{
    const std::string out = (scratch() / "bounds.csv").string();
    const Run r = run({"bounds", sqrt_json(6), "--z", "0,0.5", "--z", "0,0.25", "--npoints", "64", "--out", out});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(read_file(out));
    CHECK(rows[0] == std::vector<std::string>{"index", "re_z", "im_z", "curve", "k", "re", "im"});
    int n = 0, p = 0, l = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        n += rows[i][3] == "disk_N";
        p += rows[i][3] == "disk_P";
        l += rows[i][3] == "lens";
    }
    CHECK(n == 2 * 65);
    CHECK(p == 2 * 65);
    CHECK(l > 0);
    CHECK(run({"bounds", sqrt_json(6), "--z", "0,-1"}).code == 2);
    CHECK(run({"bounds", sqrt_json(6)}).code == 2);
}

TEST_CASE("band output")
{
    const std::string in = voigt_csv();
    const Run r = run({"band", in, "--grid", "1e-2:1e5:8:log", "--band-realizations", "10", "--seed", "4"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 9);
    CHECK(rows[0][0] == "x");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][1]) <= std::stod(rows[i][2]));
        CHECK(std::stod(rows[i][3]) <= std::stod(rows[i][4]));
        CHECK(std::stod(rows[i][5]) <= std::stod(rows[i][1]));
    }
    CHECK(run({"band", in}).code == 2);
    CHECK(run({"band", in, "--grid", "1:2"}).code == 2);
}

TEST_CASE("eis-synth matches the library dataset")
{
    const Run r = run({"eis-synth"});
    REQUIRE(r.code == 0);
    std::ostringstream expect;
    write_eis_csv(expect, synth_dataset(ImpedanceModel::dhn(20, 50, 0.5, 0.8, 20, 0.001), 1e-4, 1e6, 20, 0.01, 1));
    CHECK(r.out == expect.str());

    const Run z = run({"eis-synth", "--model", "zarc", "--param", "R=2", "--n", "5", "--noise", "0"});
    REQUIRE(z.code == 0);
    std::ostringstream ez;
    write_eis_csv(ez, synth_dataset(ImpedanceModel::zarc(2, 1, 0.5), 1e-4, 1e6, 5, 0.0, 1));
    CHECK(z.out == ez.str());

    CHECK(run({"eis-synth", "--param", "bogus=1"}).code == 2);
    CHECK(run({"eis-synth", "--model", "zarc", "--param", "phi=2"}).code == 2);
}

TEST_CASE("spectrum")
{
    const std::string f = write("rc.json", R"({"gamma":0,"poles":[[1,1]]})");
    const Run r = run({"spectrum", f});
    REQUIRE(r.code == 0);
    CHECK(r.out == "element,R,C\nR_inf,0,\nRC1,1,1\n");
    const std::string g = write("rcs.json", R"({"gamma":2,"sigma0":4,"poles":[[2,0.5]]})");
    CHECK(run({"spectrum", g}).out == "element,R,C\nR_inf,2,\nC_series,,0.25\nRC1,0.25,2\n");
    CHECK(run({"spectrum", write("junk.json", "{")}).code == 2);
}

TEST_CASE("fit and band reports are byte-identical across runs")
{
    const std::string in = sqrt_json(10);
    const std::string a = (scratch() / "a.json").string(), b = (scratch() / "b.json").string();
    run({"fit", in, "--out", a});
    run({"fit", in, "--out", b});
    CHECK(read_file(a) == read_file(b));
    const Run x = run({"band", in, "--grid", "0.1:10:5:log", "--band-realizations", "12", "--threads", "1"});
    const Run y = run({"band", in, "--grid", "0.1:10:5:log", "--band-realizations", "12", "--threads", "3"});
    CHECK(x.out == y.out);
}
