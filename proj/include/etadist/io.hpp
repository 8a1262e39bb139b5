#pragma once

// JSON and CSV output. Every JSON document is {"metadata": ..., "result": ...};
// CSV files get the same metadata in a <path>.meta.json sidecar so the CSV
// itself stays a plain table with a header row. Keys come out sorted, so
// reruns with the same inputs differ only in the timestamp.

#include "charfun.hpp"
#include "cumulant.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "random_model.hpp"
#include "version.hpp"
#include "zeta_line.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

namespace nlohmann {

template<>
struct adl_serializer<std::complex<double>> {
    static void to_json(json& j, const std::complex<double>& z) { j = json::array({z.real(), z.imag()}); }
    static void from_json(const json& j, std::complex<double>& z) { z = {j.at(0).get<double>(), j.at(1).get<double>()}; }
};

} // namespace nlohmann

namespace etadist {

using json = nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ModelPoint, sigma, m, alpha)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CharFnResult, value, log_abs, tail_error, cutoff_y, z_threshold)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DensityGrid, mp, extent, step, tol, n, values, raw_values, cutoff_y,
                                   inversion_radius, w_step, period, truncation_error, normalization_residual,
                                   min_raw, max_edge, decay_threshold, w_nodes)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MarginalDensity, mp, xs, values, raw_values, tol)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DecayThreshold, w0, scan_max, step)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MCSample, seed, n_samples, sigma, m, cutoff_y, values)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TailEstimate, fraction, standard_error)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CumulantValue, kappa, f, f1, f2, error_estimate, beyond_table,
                                   quadrature_primes, saddle_primes, cutoff_y)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GnTable, sigma, values, g0_alias_G, g1_direct)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ModelConstants, sigma, m, g0, g1, A, A_m, C_m)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SaddleResult, mp, tau, kappa, f, f1, f2, tail_main, log10_tail_main,
                                   error_scale, tail_asymptotic, log10_tail_asymptotic, cutoff_y,
                                   beyond_table, cumulant_error, iterations)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TiltedDensity, saddle, xs, values, gaussian)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MellinBracket, lower, upper, first, second, truncation_error)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EmpiricalMeasure, mp, T, cutoff_y, t_step, samples, sorted_proj)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SurrogateChoice, y, y_uncapped, capped, w, threshold)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Rectangle, c1, d1, c2, d2)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RectangleFamily, limit, rectangles)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DiscrepancyReport, T, cutoff_y, family_size, value, argmax,
                                   empirical_at_argmax, model_at_argmax, n_samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BSCrosscheck, plain, smoothed, error_bound, L)

inline std::string utc_timestamp()
{
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// parameters and error_budgets are free-form objects supplied by the caller
inline json metadata(const std::string& command, const json& parameters, const json& error_budgets)
{
    return json{{"library", "etadist"},
                {"version", version},
                {"command", command},
                {"parameters", parameters},
                {"error_budgets", error_budgets},
                {"timestamp", utc_timestamp()}};
}

inline json document(const json& meta, const json& result) { return json{{"metadata", meta}, {"result", result}}; }

inline json error_document(const Error& e)
{
    json j{{"kind", e.kind()}, {"message", e.what()}, {"exit_code", e.exit_code()}};
    if (auto* n = dynamic_cast<const NumericError*>(&e); n && !n->diagnostics().empty())
        j["diagnostics"] = n->diagnostics();
    return json{{"error", j}};
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParameterError("cannot open " + path + " for writing");
    out << text;
    if (!out)
        throw ParameterError("write to " + path + " failed");
}

inline void write_json(const std::string& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

inline json read_json(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParameterError("cannot open " + path);
    return json::parse(in);
}

// shortest representation that reads back to the same double
inline std::string format_number(double v)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::initializer_list<double> values)
    {
        if (values.size() != header_.size())
            throw InternalError("csv row width does not match header");
        bool first = true;
        for (double v : values) {
            if (!first)
                body_ += ',';
            body_ += format_number(v);
            first = false;
        }
        body_ += '\n';
    }

    std::string str() const
    {
        std::string s;
        for (std::size_t i = 0; i < header_.size(); ++i)
            s += (i ? "," : "") + header_[i];
        return s + "\n" + body_;
    }

  private:
    std::vector<std::string> header_;
    std::string body_;
};

inline std::string sidecar_path(const std::string& csv_path) { return csv_path + ".meta.json"; }

inline void write_csv(const std::string& path, const CsvTable& table, const json& meta)
{
    write_text(path, table.str());
    write_json(sidecar_path(path), json{{"metadata", meta}});
}

inline CsvTable to_csv(const DensityGrid& g)
{
    CsvTable t({"x", "y", "density", "raw"});
    for (std::size_t iy = 0; iy < g.n; ++iy)
        for (std::size_t ix = 0; ix < g.n; ++ix)
            t.row({g.coord(ix), g.coord(iy), g.at(ix, iy), g.raw_at(ix, iy)});
    return t;
}

inline CsvTable to_csv(const MarginalDensity& md)
{
    CsvTable t({"x", "density", "raw"});
    for (std::size_t i = 0; i < md.xs.size(); ++i)
        t.row({md.xs[i], md.values[i], md.raw_values[i]});
    return t;
}

inline CsvTable to_csv(const EmpiricalMeasure& em)
{
    CsvTable t({"t", "re", "im"});
    for (std::size_t j = 0; j < em.samples.size(); ++j)
        t.row({em.t_at(j), em.samples[j].real(), em.samples[j].imag()});
    return t;
}

inline CsvTable to_csv(const TiltedDensity& td)
{
    CsvTable t({"x", "density", "gaussian"});
    for (std::size_t i = 0; i < td.xs.size(); ++i)
        t.row({td.xs[i], td.values[i], td.gaussian[i]});
    return t;
}

// Minimal CSV reader for numeric tables written above.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline CsvData read_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParameterError("cannot open " + path);
    CsvData d;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= s.size(); ++i)
            if (i == s.size() || s[i] == ',') {
                out.push_back(s.substr(start, i - start));
                start = i + 1;
            }
        return out;
    };
    if (std::getline(in, line))
        d.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<double> row;
        for (const auto& cell : split(line)) {
            double v = 0;
            auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (r.ec != std::errc())
                throw ParameterError("bad number '" + cell + "' in " + path);
            row.push_back(v);
        }
        d.rows.push_back(std::move(row));
    }
    return d;
}

} // namespace etadist
