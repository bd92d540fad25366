#include "mpotrace/serialization.hpp"

#include "mpotrace/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

static_assert(std::endian::native == std::endian::little, "serialization assumes a little-endian host");

namespace mpotrace::serialization {

namespace {

constexpr char kMpoMagic[4] = {'M', 'P', 'O', '1'};
constexpr char kRunMagic[4] = {'L', 'R', 'U', 'N'};
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 32;

template<typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template<typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if(!in) throw FormatError("unexpected end of stream");
    return v;
}

std::uint64_t get_count(std::istream& in) {
    const auto n = get<std::uint64_t>(in);
    if(n > kMaxCount) throw FormatError("implausible element count " + std::to_string(n));
    return n;
}

void put_string(std::ostream& out, const std::string& s) {
    put<std::uint64_t>(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    std::string s(get_count(in), '\0');
    in.read(s.data(), static_cast<std::streamsize>(s.size()));
    if(!in) throw FormatError("unexpected end of stream");
    return s;
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
    put<std::uint64_t>(out, v.size());
    for(double x : v) put(out, x);
}

std::vector<double> get_doubles(std::istream& in) {
    std::vector<double> v(get_count(in));
    for(auto& x : v) x = get<double>(in);
    return v;
}

void check_header(std::istream& in, const char (&magic)[4], std::uint32_t version) {
    char m[4];
    in.read(m, 4);
    if(!in || std::memcmp(m, magic, 4) != 0) throw FormatError("bad magic bytes");
    const auto v = get<std::uint32_t>(in);
    if(v != version)
        throw FormatError("unsupported format version " + std::to_string(v) + " (expected " + std::to_string(version) + ")");
}

template<typename Writer>
void atomic_write(const std::filesystem::path& path, Writer&& write) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if(!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        write(out);
        out.flush();
        if(!out) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

std::ifstream open_read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if(!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

} // namespace

void write_mpo(std::ostream& out, const mpo::Mpo& u) {
    out.write(kMpoMagic, 4);
    put(out, kMpoVersion);
    put<std::uint64_t>(out, u.length());
    for(const auto& w : u.sites()) {
        for(std::size_t a = 0; a < 4; ++a) put<std::uint64_t>(out, w.extent(a));
        for(const cplx& z : w.data()) {
            put(out, z.real());
            put(out, z.imag());
        }
    }
}

mpo::Mpo read_mpo(std::istream& in) {
    check_header(in, kMpoMagic, kMpoVersion);
    const auto length = get_count(in);
    std::vector<tensor::DenseTensor> sites;
    sites.reserve(length);
    for(std::uint64_t i = 0; i < length; ++i) {
        tensor::Shape shape(4);
        std::uint64_t total = 1;
        for(auto& e : shape) {
            e = get_count(in);
            if(e == 0) throw FormatError("zero extent in MPO site");
            total *= e;
            if(total > kMaxCount) throw FormatError("MPO site too large");
        }
        std::vector<cplx> data(total);
        for(auto& z : data) {
            const double re = get<double>(in);
            z = {re, get<double>(in)};
        }
        sites.emplace_back(std::move(shape), std::move(data));
    }
    try {
        return mpo::Mpo(std::move(sites));
    } catch(const std::invalid_argument& e) {
        throw FormatError(std::string("inconsistent MPO: ") + e.what());
    }
}

void write_run(std::ostream& out, const lanczos::LanczosRun& run) {
    out.write(kRunMagic, 4);
    put(out, kRunVersion);
    put<std::uint64_t>(out, run.sites);
    put_doubles(out, run.projection.alphas);
    put_doubles(out, run.projection.betas);
    put(out, run.projection.beta1);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(run.projection.termination));
    put<std::uint64_t>(out, run.compression_log.size());
    for(const auto& l : run.compression_log) {
        put<std::uint64_t>(out, l.iteration);
        put(out, l.discarded_weight);
        put<std::uint64_t>(out, l.max_bond_dimension);
    }
    put_string(out, run.operator_label);
    put_string(out, run.start_label);
    put(out, run.operator_fingerprint);
}

lanczos::LanczosRun read_run(std::istream& in) {
    check_header(in, kRunMagic, kRunVersion);
    lanczos::LanczosRun run;
    run.sites = get_count(in);
    auto& p = run.projection;
    p.alphas = get_doubles(in);
    p.betas = get_doubles(in);
    p.beta1 = get<double>(in);
    const auto term = get<std::uint32_t>(in);
    if(term > static_cast<std::uint32_t>(lanczos::Termination::stop_rule)) throw FormatError("bad termination code");
    p.termination = static_cast<lanczos::Termination>(term);
    if(p.alphas.empty() || p.betas.size() + 1 != p.alphas.size())
        throw FormatError("inconsistent tridiagonal projection");
    run.compression_log.resize(get_count(in));
    for(auto& l : run.compression_log) {
        l.iteration = get<std::uint64_t>(in);
        l.discarded_weight = get<double>(in);
        l.max_bond_dimension = get<std::uint64_t>(in);
    }
    run.operator_label = get_string(in);
    run.start_label = get_string(in);
    run.operator_fingerprint = get<std::uint64_t>(in);
    run.quadrature = lanczos::make_quadrature(p);
    return run;
}

void save_mpo(const std::filesystem::path& path, const mpo::Mpo& u) {
    atomic_write(path, [&](std::ostream& out) { write_mpo(out, u); });
}

mpo::Mpo load_mpo(const std::filesystem::path& path) {
    auto in = open_read(path);
    return read_mpo(in);
}

void save_run(const std::filesystem::path& path, const lanczos::LanczosRun& run) {
    atomic_write(path, [&](std::ostream& out) { write_run(out, run); });
}

lanczos::LanczosRun load_run(const std::filesystem::path& path) {
    auto in = open_read(path);
    return read_run(in);
}

} // namespace mpotrace::serialization
