#pragma once

#include <filesystem>

#include "passconn/connectivity.hpp"

namespace passconn::matrix_io {

// CSV: a header row `unassigned,<label1>,...,<labelM>` followed by one row of
// counts per source voxel. The row -> voxel map goes to a sidecar file (see
// rows_path) with header `row,i,j,k`.
void write_csv(const ConnectivityMatrix& m, const std::filesystem::path& path);
ConnectivityMatrix read_csv(const std::filesystem::path& path);

// Sidecar for `C.csv` is `C.rows.csv`.
std::filesystem::path rows_path(const std::filesystem::path& csv_path);

// Little-endian binary layout:
//   char[8]  magic "PCONNMAT"
//   u32      version (1)
//   u32      M (target regions)
//   u64      N (rows)
//   u32[M]   column labels
//   i32[3N]  row voxel indices (i, j, k)
//   i64[N*(M+1)] counts, row-major, column 0 unassigned
void write_binary(const ConnectivityMatrix& m, const std::filesystem::path& path);
ConnectivityMatrix read_binary(const std::filesystem::path& path);

// Binary when the file starts with the magic, CSV otherwise.
ConnectivityMatrix read(const std::filesystem::path& path);
// Binary for a `.bin` suffix, CSV otherwise.
void write(const ConnectivityMatrix& m, const std::filesystem::path& path);

}  // namespace passconn::matrix_io
