#pragma once

// Output directories, manifests and gnuplot scripts for the command line tool.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace chemomass::cli {

/// The flag value when given, else $CHEMOMASS_OUT, else "chemomass_out".
std::filesystem::path resolve_output_dir(const std::string& flag_value);

/// Every file written through an OutputDir is remembered so that the manifest
/// can list it with its SHA-256.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

  /// Opens `name` in binary mode (LF line endings on every platform) and
  /// hands the stream to `fill`.
  void write(const std::string& name, const std::function<void(std::ostream&)>& fill);

  /// MANIFEST.sha256 in `sha256sum -c` format, sorted by file name.
  void write_manifest() const;

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

std::string sha256_file(const std::filesystem::path& path);

/// "12pi", "pi", "4.5pi", "3*pi" or a plain number. Throws InvalidInput.
double parse_mass(const std::string& text);
/// Comma-separated list of masses.
std::vector<double> parse_mass_list(const std::string& text);

/// Formats a time for file names: "t12.5000".
std::string time_tag(double t);

struct ProfileSet {
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<std::string, double>> files;  ///< (csv name, time)
};

/// Script drawing sup u and u(0,t) against t on a log axis, plus the profile
/// snapshots when there are any.
std::string trajectory_plot(const std::string& trajectory_csv, const std::string& stem, const ProfileSet& profiles);
/// Verdict against m/pi; a placeholder comment when the table is empty.
std::string sweep_plot(const std::string& sweep_csv, std::size_t rows);
/// Initial data u0 and w0 against r on log-log axes.
std::string data_plot(const std::string& u_csv, const std::string& w_csv);

}  // namespace chemomass::cli
