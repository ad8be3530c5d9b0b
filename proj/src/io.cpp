#include "relaxfv/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace relaxfv {

const std::vector<std::string> kSeriesColumns{"t", "mass_dev", "total_mom", "F", "E",
                                              "D", "D_cum",    "support_radius", "max_grad", "min_rho"};

const std::vector<std::string> kAuxColumns{"t",           "kinetic",    "pressure_excess",     "stress",
                                           "ball_radius", "ball_x2rho", "ball_pressure_excess"};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

void close_out(std::ofstream &out, const std::string &path) {
    out.close();
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::string join(const std::vector<std::string> &cols) {
    std::string s;
    for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
    return s;
}

void write_rows(const std::string &path, const std::vector<std::string> &header,
                const std::vector<std::vector<double>> &rows) {
    auto out = open_out(path);
    out << join(header) << '\n';
    for (const auto &row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    close_out(out, path);
}

std::vector<std::vector<double>> read_rows(const std::string &path, const std::vector<std::string> &header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != join(header)) throw SchemaError(path + ": header mismatch, expected '" + join(header) + "'");
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char *end = nullptr;
            errno = 0;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
                throw SchemaError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
            row.push_back(v);
        }
        if (row.size() != header.size()) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

void write_series_csv(const std::string &path, const std::vector<DiagRecord> &records) {
    std::vector<std::vector<double>> rows;
    rows.reserve(records.size());
    for (const auto &r : records) {
        rows.push_back({r.t, r.mass_dev, r.total_mom, r.F, r.E, r.D, r.D_cum, r.support_radius, r.max_grad, r.min_rho});
    }
    write_rows(path, kSeriesColumns, rows);
}

void write_aux_csv(const std::string &path, const std::vector<DiagRecord> &records) {
    std::vector<std::vector<double>> rows;
    rows.reserve(records.size());
    for (const auto &r : records) {
        rows.push_back({r.t, r.kinetic, r.pressure_excess, r.stress, r.ball_radius, r.ball_x2rho,
                        r.ball_pressure_excess});
    }
    write_rows(path, kAuxColumns, rows);
}

std::vector<DiagRecord> read_series_csv(const std::string &path) {
    std::vector<DiagRecord> out;
    for (const auto &v : read_rows(path, kSeriesColumns)) {
        DiagRecord r;
        r.t = v[0];
        r.mass_dev = v[1];
        r.total_mom = v[2];
        r.F = v[3];
        r.E = v[4];
        r.D = v[5];
        r.D_cum = v[6];
        r.support_radius = v[7];
        r.max_grad = v[8];
        r.min_rho = v[9];
        out.push_back(r);
    }
    return out;
}

void read_aux_csv(const std::string &path, std::vector<DiagRecord> &records) {
    const auto rows = read_rows(path, kAuxColumns);
    if (rows.size() != records.size()) throw SchemaError(path + ": row count differs from the series");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &v = rows[i];
        auto &r = records[i];
        if (v[0] != r.t) throw SchemaError(path + ": time column differs from the series at row " + std::to_string(i));
        r.kinetic = v[1];
        r.pressure_excess = v[2];
        r.stress = v[3];
        r.ball_radius = v[4];
        r.ball_x2rho = v[5];
        r.ball_pressure_excess = v[6];
    }
}

void write_snapshot_csv(const std::string &path, const Field &f) {
    std::vector<std::vector<double>> rows;
    rows.reserve(f.cells.size());
    for (std::size_t i = 0; i < f.cells.size(); ++i) {
        const PointState p = f.primitive(i);
        rows.push_back({f.grid.center(i), p.rho, p.u, p.S});
    }
    write_rows(path, {"x", "rho", "u", "S"}, rows);
}

void write_xy_csv(const std::string &path, const std::string &xname, const std::string &yname,
                  const std::vector<double> &x, const std::vector<double> &y) {
    std::vector<std::vector<double>> rows;
    rows.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) rows.push_back({x[i], y.at(i)});
    write_rows(path, {xname, yname}, rows);
}

void write_text(const std::string &path, const std::string &text) {
    auto out = open_out(path);
    out << text;
    close_out(out, path);
}

} // namespace relaxfv
