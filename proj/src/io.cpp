#include "pathmc/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace pathmc {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::runtime_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << format(values[i]);
    }
    out_ << '\n';
}

void CsvWriter::raw_row(const std::string& line) { out_ << line << '\n'; }

void CsvWriter::close() {
    if (out_.is_open()) out_.close();
}

nlohmann::json driving_path_to_json(const DrivingPath& b) {
    nlohmann::json j;
    j["partition"] = b.partition.times();
    j["d"] = b.d;
    std::vector<std::vector<double>> incs;
    incs.reserve(static_cast<std::size_t>(b.segments()));
    for (int i = 0; i < b.segments(); ++i) {
        std::vector<double> col(static_cast<std::size_t>(b.d));
        for (int a = 0; a < b.d; ++a) col[static_cast<std::size_t>(a)] = b.increments(a, i);
        incs.push_back(std::move(col));
    }
    j["increments"] = incs;
    return j;
}

DrivingPath driving_path_from_json(const nlohmann::json& j) {
    const Partition p(j.at("partition").get<std::vector<double>>());
    const int d = j.at("d").get<int>();
    const auto incs = j.at("increments").get<std::vector<std::vector<double>>>();
    if (int(incs.size()) != p.segments())
        throw std::runtime_error("driving path json: increment count does not match partition");
    Mat m(d, p.segments());
    for (int i = 0; i < p.segments(); ++i) {
        if (int(incs[static_cast<std::size_t>(i)].size()) != d)
            throw std::runtime_error("driving path json: increment dimension mismatch");
        for (int a = 0; a < d; ++a) m(a, i) = incs[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
    }
    return DrivingPath(p, std::move(m));
}

void write_vertices_csv(const GeodesicPath& sigma, const std::string& path) {
    std::vector<std::string> header{"i", "s"};
    for (int a = 0; a < sigma.manifold->ambient_dim(); ++a)
        header.push_back("x" + std::to_string(a));
    CsvWriter csv(path, header);
    for (int i = 0; i <= sigma.segments(); ++i) {
        std::vector<double> row{double(i), sigma.partition.time(i)};
        for (int a = 0; a < sigma.manifold->ambient_dim(); ++a) row.push_back(sigma.vertices(a, i));
        csv.row(row);
    }
}

nlohmann::json density_report_to_json(const DensityReport& rep) {
    nlohmann::json j;
    j["rho"] = rep.rho;
    j["seg_logdets"] = rep.seg_logdets;
    j["S_P"] = rep.S_P;
    j["R_P"] = rep.R_P;
    j["W_P"] = rep.W_P;
    j["degenerate"] = rep.degenerate;
    return j;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

} // namespace pathmc
