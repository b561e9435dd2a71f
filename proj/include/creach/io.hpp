#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "creach/christoffel.hpp"
#include "creach/cloud.hpp"
#include "creach/errors.hpp"
#include "creach/validator.hpp"

namespace creach {

inline constexpr int estimator_format_version = 1;

// -- number formatting --------------------------------------------------
// Shortest decimal form that parses back to the identical double.

inline std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view text, const char* what) {
    double v = 0.0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size())
        throw config_error(std::string(what) + ": cannot parse number '" +
                           std::string(text) + "'");
    return v;
}

inline std::string format_hex64(std::uint64_t v) {
    char buf[17];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, 16);
    return std::string(buf, r.ptr);
}

inline std::uint64_t parse_hex64(std::string_view text, const char* what) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v, 16);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size())
        throw config_error(std::string(what) + ": cannot parse hex value '" +
                           std::string(text) + "'");
    return v;
}

/// Write a file through a temp sibling plus rename, so readers never see a
/// partially written document.
inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        out.flush();
        if (!out) throw error("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

// -- estimator document ---------------------------------------------------

/// Serialize a fitted estimator. The monomial order is stored explicitly as
/// the exponent list, so readers never re-derive the ordering convention.
inline nlohmann::json estimator_to_json(const christoffel_estimator& est) {
    nlohmann::json doc;
    doc["format_version"] = estimator_format_version;
    doc["n"] = est.basis().n();
    doc["k"] = est.basis().k();
    doc["ordering"] = "grlex";
    nlohmann::json exps = nlohmann::json::array();
    for (const auto& mi : est.basis().indices()) {
        nlohmann::json e = nlohmann::json::array();
        for (auto v : mi.exponents) e.push_back(static_cast<int>(v));
        exps.push_back(std::move(e));
    }
    doc["exponents"] = std::move(exps);
    doc["normalization"] = {{"offset", est.normalization().offset},
                            {"scale", est.normalization().scale}};
    doc["chol_lower"] = est.chol_lower();
    doc["alpha"] = est.alpha();

    nlohmann::json meta;
    meta["samples"] = est.meta().sample_count;
    meta["seed"] = est.meta().seed;
    meta["jitter"] = est.meta().jitter;
    meta["problem_digest"] = format_hex64(est.meta().problem_digest);
    if (std::isfinite(est.meta().epsilon)) meta["epsilon"] = est.meta().epsilon;
    if (std::isfinite(est.meta().delta)) meta["delta"] = est.meta().delta;
    doc["meta"] = std::move(meta);
    return doc;
}

inline christoffel_estimator estimator_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format_version").get<int>() != estimator_format_version)
            throw config_error("estimator document: unsupported format version");
        if (doc.at("ordering").get<std::string>() != "grlex")
            throw config_error("estimator document: unsupported monomial ordering");

        const int n = doc.at("n").get<int>();
        const int k = doc.at("k").get<int>();
        std::vector<multi_index> indices;
        for (const auto& e : doc.at("exponents")) {
            multi_index mi;
            for (const auto& v : e) {
                const int x = v.get<int>();
                if (x < 0 || x > 255)
                    throw config_error("estimator document: exponent out of range");
                mi.exponents.push_back(static_cast<std::uint8_t>(x));
            }
            indices.push_back(std::move(mi));
        }
        monomial_basis reference = enumerate_basis(n, k);
        if (indices != reference.indices())
            throw config_error(
                "estimator document: exponent list is not the grlex basis for (n,k)");

        normalization_map norm;
        norm.offset = doc.at("normalization").at("offset").get<std::vector<double>>();
        norm.scale = doc.at("normalization").at("scale").get<std::vector<double>>();
        if (norm.offset.size() != static_cast<std::size_t>(n) ||
            norm.scale.size() != static_cast<std::size_t>(n))
            throw config_error("estimator document: normalization has wrong dimension");
        for (double s : norm.scale)
            if (!(s > 0.0)) throw config_error("estimator document: scale must be positive");

        auto chol = doc.at("chol_lower").get<std::vector<double>>();
        const double alpha = doc.at("alpha").get<double>();
        if (!(alpha > 0.0)) throw config_error("estimator document: alpha must be positive");

        const auto& meta_json = doc.at("meta");
        fit_meta meta;
        meta.sample_count = meta_json.at("samples").get<std::uint64_t>();
        meta.seed = meta_json.at("seed").get<std::uint64_t>();
        meta.order = k;
        meta.jitter = meta_json.at("jitter").get<double>();
        meta.problem_digest =
            parse_hex64(meta_json.at("problem_digest").get<std::string>(), "estimator meta");
        if (meta_json.contains("epsilon")) meta.epsilon = meta_json.at("epsilon").get<double>();
        if (meta_json.contains("delta")) meta.delta = meta_json.at("delta").get<double>();

        return christoffel_estimator(std::move(reference), std::move(norm), std::move(chol),
                                     alpha, meta);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("estimator document: ") + e.what());
    }
}

inline void write_estimator(const std::filesystem::path& path,
                            const christoffel_estimator& est) {
    atomic_write(path, estimator_to_json(est).dump(2) + "\n");
}

inline christoffel_estimator read_estimator(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open estimator document '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("estimator document '" + path.string() + "': " + e.what());
    }
    return estimator_from_json(doc);
}

// -- cloud file -----------------------------------------------------------
// Delimited text: one provenance comment line, a header row naming the
// coordinates, then one row per point at full round-trip precision.

inline void write_cloud(const std::filesystem::path& path, const sample_cloud& cloud,
                        const std::vector<std::string>& coordinate_names = {}) {
    std::vector<std::string> names = coordinate_names;
    if (names.empty())
        for (int j = 1; j <= cloud.dim(); ++j) names.push_back("x" + std::to_string(j));
    if (names.size() != static_cast<std::size_t>(cloud.dim()))
        throw dimension_mismatch("write_cloud: one name per coordinate required");

    std::ostringstream out;
    out << "# creach-cloud v1 seed=" << cloud.provenance().seed
        << " count=" << cloud.provenance().count
        << " dim=" << cloud.dim()
        << " digest=" << format_hex64(cloud.provenance().problem_digest) << "\n";
    for (std::size_t j = 0; j < names.size(); ++j)
        out << names[j] << (j + 1 < names.size() ? ',' : '\n');
    for (std::uint64_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        for (int j = 0; j < cloud.dim(); ++j)
            out << format_double(p[j]) << (j + 1 < cloud.dim() ? ',' : '\n');
    }
    atomic_write(path, out.str());
}

inline sample_cloud read_cloud(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open cloud file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line) || line.rfind("# creach-cloud v1 ", 0) != 0)
        throw config_error("cloud file '" + path.string() + "': missing provenance header");

    cloud_provenance prov;
    int dim = 0;
    {
        std::istringstream header(line.substr(2));
        std::string token;
        header >> token; // creach-cloud
        header >> token; // v1
        while (header >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos)
                throw config_error("cloud file: malformed provenance token '" + token + "'");
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            try {
                if (key == "seed") prov.seed = std::stoull(value);
                else if (key == "count") prov.count = std::stoull(value);
                else if (key == "dim") dim = std::stoi(value);
                else if (key == "digest")
                    prov.problem_digest = parse_hex64(value, "cloud digest");
                else throw config_error("cloud file: unknown provenance key '" + key + "'");
            } catch (const std::logic_error&) {
                throw config_error("cloud file: bad provenance value '" + token + "'");
            }
        }
    }
    if (dim < 1) throw config_error("cloud file: bad dimension");
    if (!std::getline(in, line))
        throw config_error("cloud file '" + path.string() + "': missing header row");

    sample_cloud cloud(dim, prov.count, prov);
    for (std::uint64_t i = 0; i < prov.count; ++i) {
        if (!std::getline(in, line))
            throw config_error("cloud file '" + path.string() + "': truncated data");
        auto row = cloud.point(i);
        std::size_t begin = 0;
        for (int j = 0; j < dim; ++j) {
            std::size_t end = line.find(',', begin);
            if (j + 1 == dim) end = line.size();
            if (end == std::string::npos)
                throw config_error("cloud file: row " + std::to_string(i + 1) +
                                   " has too few columns");
            row[j] = parse_double(std::string_view(line).substr(begin, end - begin),
                                  "cloud file");
            begin = end + 1;
        }
    }
    return cloud;
}

// -- grid file --------------------------------------------------------------

/// Evaluate C on a rows x cols grid over [x1min,x1max] x [x2min,x2max] and
/// write records x1, x2, C, inside (row-major: x2 varies with the row index,
/// x1 with the column index). Requires a 2-D estimator.
inline void write_grid(const std::filesystem::path& path, const christoffel_estimator& est,
                       double x1min, double x1max, double x2min, double x2max, int rows,
                       int cols) {
    if (est.basis().n() != 2)
        throw dimension_mismatch("grid export requires a 2-D estimator (n=2)");
    if (rows < 2 || cols < 2)
        throw std::invalid_argument("grid export needs at least 2 rows and 2 cols");

    std::ostringstream out;
    out << "# creach-grid v1 alpha=" << format_double(est.alpha()) << " rows=" << rows
        << " cols=" << cols << "\n";
    out << "x1,x2,C,inside\n";
    std::vector<double> xn(2), v(est.basis().size());
    for (int r = 0; r < rows; ++r) {
        const double x2 = x2min + (x2max - x2min) * r / (rows - 1);
        for (int c = 0; c < cols; ++c) {
            const double x1 = x1min + (x1max - x1min) * c / (cols - 1);
            const double point[2] = {x1, x2};
            const double value = est.evaluate_with_scratch(point, xn, v);
            out << format_double(x1) << ',' << format_double(x2) << ','
                << format_double(value) << ',' << (value <= est.alpha() ? 1 : 0) << "\n";
        }
    }
    atomic_write(path, out.str());
}

// -- accuracy report ----------------------------------------------------------

inline nlohmann::json report_to_json(const accuracy_report& report) {
    nlohmann::json doc;
    doc["n_ap"] = report.n_ap;
    doc["n_out"] = report.n_out;
    doc["empirical_accuracy"] = report.empirical_accuracy;
    doc["margin"] = report.chernoff.margin;
    doc["confidence"] = report.chernoff.confidence;
    doc["certified_lower_bound"] = report.certified_lower_bound;
    doc["seed"] = report.seed;
    if (!report.outliers.empty()) doc["outliers"] = report.outliers;
    return doc;
}

inline std::string report_to_text(const accuracy_report& report) {
    std::ostringstream out;
    out << "n_ap: " << report.n_ap << "\n";
    out << "n_out: " << report.n_out << "\n";
    out << "empirical_accuracy: " << format_double(report.empirical_accuracy) << "\n";
    out << "margin: " << format_double(report.chernoff.margin) << "\n";
    out << "confidence: " << format_double(report.chernoff.confidence) << "\n";
    out << "certified_lower_bound: " << format_double(report.certified_lower_bound) << "\n";
    out << "seed: " << report.seed << "\n";
    return out.str();
}

/// Write <prefix>.txt (key/value) and <prefix>.json side by side.
inline void write_report(const std::filesystem::path& prefix, const accuracy_report& report) {
    std::filesystem::path txt = prefix;
    txt += ".txt";
    std::filesystem::path json = prefix;
    json += ".json";
    atomic_write(txt, report_to_text(report));
    atomic_write(json, report_to_json(report).dump(2) + "\n");
}

} // namespace creach
