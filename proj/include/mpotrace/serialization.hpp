#pragma once

#include "mpotrace/lanczos.hpp"
#include "mpotrace/mpo.hpp"

#include <filesystem>
#include <iosfwd>

// Little-endian binary formats. Each file starts with a 4-byte magic and a
// u32 version; readers reject anything else with FormatError.

namespace mpotrace::serialization {

inline constexpr std::uint32_t kMpoVersion = 1;
inline constexpr std::uint32_t kRunVersion = 1;

void write_mpo(std::ostream& out, const mpo::Mpo& u);
mpo::Mpo read_mpo(std::istream& in);

void write_run(std::ostream& out, const lanczos::LanczosRun& run);
lanczos::LanczosRun read_run(std::istream& in);

// File helpers; writes go through a temporary file and a rename.
void save_mpo(const std::filesystem::path& path, const mpo::Mpo& u);
mpo::Mpo load_mpo(const std::filesystem::path& path);
void save_run(const std::filesystem::path& path, const lanczos::LanczosRun& run);
lanczos::LanczosRun load_run(const std::filesystem::path& path);

} // namespace mpotrace::serialization
