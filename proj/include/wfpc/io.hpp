#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wfpc/qrf.hpp"

namespace wfpc {

struct IOError : Error {
    using Error::Error;
};

// Provenance stamped into every artifact.
struct Provenance {
    std::string config_hash;  // 16 hex digits
    std::uint64_t seed = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// One row per time node and mask: t,p,mask_id,method.
void write_trajectories_csv(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories,
                            const Provenance& prov);

// t,re,im
void write_field_csv(const std::filesystem::path& path, const TimeField& field, const Provenance& prov);

// t1,t2,re_exact,im_exact,re_regr,im_regr,deviation,chi_norm,violated
void write_qrf_csv(const std::filesystem::path& path, const std::vector<QrfReport>& reports,
                   const Provenance& prov);

// Plain-text matrix: header lines
//   # wfpc-matrix
//   dims <rows> <cols>
//   layout <ground> <excited> <env...>
// followed by rows*cols lines of "re im" in row-major order.
void write_matrix(const std::filesystem::path& path, const ComplexMatrix& m, const SpaceLayout& layout);

struct MatrixFile {
    ComplexMatrix matrix;
    SpaceLayout layout;
};
MatrixFile read_matrix(const std::filesystem::path& path);

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

} // namespace wfpc
