#include "retrodiff/field_io.hpp"

#include "retrodiff/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace retrodiff {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_field(std::ostream& out, const SpectralField& v) {
    out << "retrodiff-field v1\n";
    out << "d " << v.grid().dim << "\n";
    out << "ell " << format_double(v.grid().ell) << "\n";
    out << "n " << v.grid().n_per_axis << "\n";
    for (const auto& c : v.coeffs())
        out << format_double(c.real()) << " " << format_double(c.imag()) << "\n";
}

void write_field(const std::filesystem::path& path, const SpectralField& v) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open field file for writing: " + path.string());
    write_field(out, v);
    if (!out.good()) throw IoError("failed while writing field file: " + path.string());
}

SpectralField read_field(std::istream& in) {
    std::string magic;
    std::getline(in, magic);
    if (magic != "retrodiff-field v1")
        throw IoError("not a retrodiff field file (bad magic line)");

    GridSpec grid;
    std::string key;
    if (!(in >> key >> grid.dim) || key != "d") throw IoError("field file: expected 'd <dim>'");
    if (!(in >> key >> grid.ell) || key != "ell") throw IoError("field file: expected 'ell <len>'");
    if (!(in >> key >> grid.n_per_axis) || key != "n") throw IoError("field file: expected 'n <points>'");
    validate(grid);

    std::vector<std::complex<double>> coeffs(grid.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im))
            throw IoError("field file: truncated at coefficient " + std::to_string(i));
        coeffs[i] = {re, im};
    }
    return SpectralField(grid, std::move(coeffs));
}

SpectralField read_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open field file: " + path.string());
    return read_field(in);
}

} // namespace retrodiff
