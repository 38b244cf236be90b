#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "starkwp/errors.hpp"
#include "starkwp/util.hpp"

namespace starkwp {

/// CSV with '#'-prefixed header lines: file kind, optional timestamp, the
/// full run config between config-begin/config-end markers, free-form meta
/// lines, then the column list and comma-separated data rows.
struct CsvWriter {
    std::string kind;
    std::string config_text;                                 // may be empty
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    bool deterministic = false;

    void write_header(std::ostream& os) const {
        os << "# starkwp " << kind << " v1\n";
        if (!deterministic) {
            std::time_t now = std::time(nullptr);
            char buf[64];
            std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            os << "# generated: " << buf << "\n";
        }
        if (!config_text.empty()) {
            char hex[32];
            std::snprintf(hex, sizeof(hex), "0x%016llx",
                          static_cast<unsigned long long>(fnv1a64(config_text)));
            os << "# config_fnv: " << hex << "\n";
            os << "# config-begin\n";
            std::istringstream is(config_text);
            std::string line;
            while (std::getline(is, line)) os << "# " << line << "\n";
            os << "# config-end\n";
        }
        for (const auto& [k, v] : meta) os << "# meta: " << k << " = " << v << "\n";
        os << "# columns: ";
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << (i ? "," : "") << columns[i];
        os << "\n";
    }

    void write_row(std::ostream& os, const std::vector<double>& row) const {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
};

struct CsvFile {
    std::string kind;
    std::string config_text;
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw InputError("missing CSV column: " + name);
        const std::size_t idx = it - columns.begin();
        std::vector<double> out(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][idx];
        return out;
    }
};

inline CsvFile read_csv(std::istream& is) {
    CsvFile out;
    std::string line;
    bool in_config = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.size() > 1 && line[1] == ' ' ? line.substr(2)
                                                                 : line.substr(1);
            if (body.rfind("starkwp ", 0) == 0) {
                std::istringstream hs(body);
                std::string tag;
                hs >> tag >> out.kind;
            } else if (body == "config-begin") {
                in_config = true;
            } else if (body == "config-end") {
                in_config = false;
            } else if (in_config) {
                out.config_text += body + "\n";
            } else if (body.rfind("meta: ", 0) == 0) {
                const std::string kv = body.substr(6);
                const auto eq = kv.find('=');
                if (eq != std::string::npos) {
                    std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                    while (!k.empty() && k.back() == ' ') k.pop_back();
                    while (!v.empty() && v.front() == ' ') v.erase(v.begin());
                    out.meta[k] = v;
                }
            } else if (body.rfind("columns: ", 0) == 0) {
                std::istringstream cs(body.substr(9));
                std::string col;
                while (std::getline(cs, col, ',')) out.columns.push_back(col);
            }
            continue;
        }
        std::vector<double> row;
        std::istringstream rs(line);
        std::string cell;
        while (std::getline(rs, cell, ','))
            row.push_back(std::strtod(cell.c_str(), nullptr));
        if (!out.columns.empty() && row.size() != out.columns.size())
            throw InputError("CSV row width does not match column list");
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline CsvFile read_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open: " + path);
    return read_csv(f);
}

/// Binary P6 grayscale image: rows = delay ascending downward, columns =
/// field bins ascending rightward, linearly normalized to the peak signal.
inline void write_ppm(std::ostream& os, const Eigen::MatrixXd& m) {
    const Eigen::Index h = m.rows(), w = m.cols();
    const double peak = m.maxCoeff();
    os << "P6\n" << w << " " << h << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * 3);
    for (Eigen::Index i = 0; i < h; ++i) {
        for (Eigen::Index j = 0; j < w; ++j) {
            double v = peak > 0.0 ? m(i, j) / peak : 0.0;
            v = std::clamp(v, 0.0, 1.0);
            const auto g = static_cast<unsigned char>(std::lround(255.0 * v));
            row[3 * j] = row[3 * j + 1] = row[3 * j + 2] = g;
        }
        os.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
}

} // namespace starkwp
