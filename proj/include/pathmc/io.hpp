#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathmc/jacobi.hpp"
#include "pathmc/paths.hpp"

namespace pathmc {

// CSV with a fixed 17-significant-digit decimal format so identical runs
// produce byte-identical artifacts.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);
    void close();
    const std::string& path() const { return path_; }

    static std::string format(double v);

private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_;
};

// Path serialization: {"partition": [...], "d": ..., "increments": [[...]]}.
nlohmann::json driving_path_to_json(const DrivingPath& b);
DrivingPath driving_path_from_json(const nlohmann::json& j);

// Vertices of a developed path as CSV rows (i, s_i, x_0, ..., x_{a-1}).
void write_vertices_csv(const GeodesicPath& sigma, const std::string& path);

nlohmann::json density_report_to_json(const DensityReport& rep);

// 64-bit FNV-1a over a string; used for content-hashing configs.
std::uint64_t fnv1a64(const std::string& data);

} // namespace pathmc
