#include "wfpc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace wfpc {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open " + path.string() + " for writing");
    return out;
}

void header(std::ostream& out, const Provenance& prov) {
    out << "# config_hash=" << prov.config_hash << " seed=" << prov.seed << '\n';
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IOError("write failed: " + path.string());
}

} // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trajectories_csv(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories,
                            const Provenance& prov) {
    auto out = open_out(path);
    header(out, prov);
    out << "t,p,mask_id,method\n";
    for (std::size_t m = 0; m < trajectories.size(); ++m) {
        const auto& tr = trajectories[m];
        const auto method = to_string(tr.method);
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            out << format_double(tr.times[i]) << ',' << format_double(tr.populations[i]) << ',' << m << ','
                << method << '\n';
    }
    finish(out, path);
}

void write_field_csv(const std::filesystem::path& path, const TimeField& field, const Provenance& prov) {
    auto out = open_out(path);
    header(out, prov);
    out << "t,re,im\n";
    for (std::size_t i = 0; i < field.times.size(); ++i)
        out << format_double(field.times[i]) << ',' << format_double(field.values[i].real()) << ','
            << format_double(field.values[i].imag()) << '\n';
    finish(out, path);
}

void write_qrf_csv(const std::filesystem::path& path, const std::vector<QrfReport>& reports,
                   const Provenance& prov) {
    auto out = open_out(path);
    header(out, prov);
    out << "t1,t2,re_exact,im_exact,re_regr,im_regr,deviation,chi_norm,violated\n";
    for (const auto& r : reports)
        out << format_double(r.t1) << ',' << format_double(r.t2) << ',' << format_double(r.exact_value.real())
            << ',' << format_double(r.exact_value.imag()) << ',' << format_double(r.regression_value.real())
            << ',' << format_double(r.regression_value.imag()) << ',' << format_double(r.deviation) << ','
            << format_double(r.chi_norm) << ',' << (r.violated ? 1 : 0) << '\n';
    finish(out, path);
}

void write_matrix(const std::filesystem::path& path, const ComplexMatrix& m, const SpaceLayout& layout) {
    auto out = open_out(path);
    out << "# wfpc-matrix\n";
    out << "dims " << m.rows() << ' ' << m.cols() << '\n';
    out << "layout " << layout.ground_dim << ' ' << layout.excited_dim;
    for (auto d : layout.env_dims) out << ' ' << d;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << format_double(m(i, j).real()) << ' ' << format_double(m(i, j).imag()) << '\n';
    finish(out, path);
}

MatrixFile read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open " + path.string());
    auto fail = [&](const std::string& why) { return IOError(path.string() + ": " + why); };

    std::string line;
    if (!std::getline(in, line) || line != "# wfpc-matrix") throw fail("missing '# wfpc-matrix' header");

    std::string key;
    Eigen::Index rows = 0, cols = 0;
    if (!std::getline(in, line)) throw fail("missing dims line");
    std::istringstream dims(line);
    if (!(dims >> key >> rows >> cols) || key != "dims" || rows <= 0 || cols <= 0) throw fail("bad dims line");

    MatrixFile mf;
    if (!std::getline(in, line)) throw fail("missing layout line");
    std::istringstream lay(line);
    if (!(lay >> key >> mf.layout.ground_dim >> mf.layout.excited_dim) || key != "layout")
        throw fail("bad layout line");
    for (std::size_t d; lay >> d;) mf.layout.env_dims.push_back(d);

    mf.matrix.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            double re = 0.0, im = 0.0;
            if (!(in >> re >> im)) throw fail("truncated matrix body");
            mf.matrix(i, j) = Complex{re, im};
        }
    return mf;
}

} // namespace wfpc
