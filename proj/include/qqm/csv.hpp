#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qqm/grid.hpp"

namespace qqm {

/// Formats a double with 17 significant digits so the text round-trips to
/// the same bits, and byte-identically on every run.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline void append_value(std::string& row, double v) {
  row += ',';
  row += format_double(v);
}
inline void append_value(std::string& row, const Complex& v) {
  row += ',';
  row += format_double(v.real());
  row += ',';
  row += format_double(v.imag());
}

inline std::string column_names(const std::string& base, double) {
  return base;
}
inline std::string column_names(const std::string& base, const Complex&) {
  return base + "_re," + base + "_im";
}

}  // namespace detail

/// Atomic text write: the file appears complete or not at all.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DomainError("cannot open output file " + tmp.string());
    }
    out << contents;
  }
  std::filesystem::rename(tmp, path);
}

/// One row per unmasked node: coordinates, then components.
template <typename T>
std::string field_csv(const ScalarField<T>& f, const std::string& name) {
  std::string out = "x,y," + detail::column_names(name, T{}) + "\n";
  const GridSpec& g = f.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      std::string row = format_double(g.x(i));
      row += ',';
      row += format_double(g.y(j));
      detail::append_value(row, f.at(i, j));
      row += '\n';
      out += row;
    }
  }
  return out;
}

template <typename T>
std::string field_csv(const VectorField<T>& f, const std::string& name) {
  std::string out = "x,y," + detail::column_names(name + "_x", T{}) + "," +
                    detail::column_names(name + "_y", T{}) + "\n";
  const GridSpec& g = f.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      std::string row = format_double(g.x(i));
      row += ',';
      row += format_double(g.y(j));
      detail::append_value(row, f.x(i, j));
      detail::append_value(row, f.y(i, j));
      row += '\n';
      out += row;
    }
  }
  return out;
}

inline std::string field_csv(const QuatField& f) {
  std::string out = "x,y,psi_z_re,psi_z_im,psi_zeta_re,psi_zeta_im\n";
  const GridSpec& g = f.z.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      std::string row = format_double(g.x(i));
      row += ',';
      row += format_double(g.y(j));
      detail::append_value(row, f.z.at(i, j));
      detail::append_value(row, f.zeta.at(i, j));
      row += '\n';
      out += row;
    }
  }
  return out;
}

}  // namespace qqm
