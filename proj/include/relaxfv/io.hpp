#pragma once

// CSV artifacts: the diagnostics series (fixed ten-column schema), the
// auxiliary integrals in a sidecar file, field snapshots and profile samples.
// Numbers are written with 17 significant digits so a read-back is exact.

#include "relaxfv/diagnostics.hpp"
#include "relaxfv/solver.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace relaxfv {

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// %.17g
std::string format_double(double v);

extern const std::vector<std::string> kSeriesColumns;
extern const std::vector<std::string> kAuxColumns;

void write_series_csv(const std::string &path, const std::vector<DiagRecord> &records);
void write_aux_csv(const std::string &path, const std::vector<DiagRecord> &records);

/// Throws SchemaError on a header mismatch, wrong field count or bad number.
std::vector<DiagRecord> read_series_csv(const std::string &path);

/// Fills the auxiliary fields of `records` row by row; the t columns must
/// agree exactly.
void read_aux_csv(const std::string &path, std::vector<DiagRecord> &records);

/// Columns x, rho, u, S.
void write_snapshot_csv(const std::string &path, const Field &f);

/// Columns x, u.
void write_xy_csv(const std::string &path, const std::string &xname, const std::string &yname,
                  const std::vector<double> &x, const std::vector<double> &y);

/// Writes `text` to `path`, throwing std::runtime_error on failure.
void write_text(const std::string &path, const std::string &text);

} // namespace relaxfv
