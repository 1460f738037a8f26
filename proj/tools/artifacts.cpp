#include "artifacts.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "chemomass/errors.hpp"
#include "chemomass/radial_core.hpp"

namespace chemomass::cli {

std::filesystem::path resolve_output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CHEMOMASS_OUT"); env && *env) return env;
  return "chemomass_out";
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void OutputDir::write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
  const auto path = root_ / name;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  fill(os);
  os.close();
  if (!os) throw std::runtime_error("failed writing " + path.string());
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void OutputDir::write_manifest() const {
  auto names = files_;
  std::sort(names.begin(), names.end());
  std::ofstream os(root_ / "MANIFEST.sha256", std::ios::binary | std::ios::trunc);
  for (const auto& n : names) os << sha256_file(root_ / n) << "  " << n << '\n';
  if (!os) throw std::runtime_error("failed writing the manifest");
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char two[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, const std::string& whole) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidInput("cannot read a mass from '" + whole + "'");
  return v;
}

}  // namespace

double parse_mass(const std::string& text) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s.empty()) throw InvalidInput("empty mass value");
  double v;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    std::string coef = trim(s.substr(0, s.size() - 2));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    v = (coef.empty() ? 1.0 : parse_number(coef, text)) * kPi;
  } else {
    v = parse_number(s, text);
  }
  if (!std::isfinite(v) || !(v > 0.0)) throw InvalidInput("mass must be positive and finite, got '" + text + "'");
  return v;
}

std::vector<double> parse_mass_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_mass(item));
  if (out.empty()) throw InvalidInput("empty mass list");
  return out;
}

std::string time_tag(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t%.4f", t);
  return buf;
}

std::string trajectory_plot(const std::string& trajectory_csv, const std::string& stem, const ProfileSet& profiles) {
  std::ostringstream gp;
  gp << "# gnuplot " << stem << ".gp\n"
     << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output '" << stem << "_sup.png'\n"
     << "set logscale y\n"
     << "set xlabel 't'\n"
     << "set ylabel 'sup u, u(0,t)'\n"
     << "plot '" << trajectory_csv << "' skip 1 using 1:2 with lines title 'sup u', \\\n"
     << "     '" << trajectory_csv << "' skip 1 using 1:6 with lines title 'u(0,t)'\n";
  if (profiles.files.empty()) return gp.str();
  gp << "unset logscale y\n"
     << "set output '" << stem << "_profiles.png'\n"
     << "set xlabel '" << profiles.x_label << "'\n"
     << "set ylabel '" << profiles.y_label << "'\n"
     << "plot ";
  for (std::size_t i = 0; i < profiles.files.size(); ++i) {
    if (i) gp << ", \\\n     ";
    gp << "'" << profiles.files[i].first << "' skip 1 using 1:2 with lines title 't = " << profiles.files[i].second
       << "'";
  }
  gp << '\n';
  return gp.str();
}

std::string sweep_plot(const std::string& sweep_csv, std::size_t rows) {
  std::ostringstream gp;
  gp << "# gnuplot sweep.gp\n";
  if (rows == 0) {
    gp << "# the sweep table is empty: nothing to plot\n";
    return gp.str();
  }
  gp << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,400\n"
     << "set output 'sweep.png'\n"
     << "set xlabel 'm / pi'\n"
     << "set yrange [-0.5:3.5]\n"
     << "set ytics ('Bounded' 0, 'Undecided' 1, 'Growing' 2, 'Error' 3)\n"
     << "verdict(s) = s eq 'Bounded' ? 0 : s eq 'Growing' ? 2 : s eq 'Error' ? 3 : 1\n"
     << "plot '" << sweep_csv << "' skip 1 using ($1/pi):(verdict(strcol(3))) with points pt 7 ps 1.5 notitle\n";
  return gp.str();
}

std::string data_plot(const std::string& u_csv, const std::string& w_csv) {
  std::ostringstream gp;
  gp << "# gnuplot data.gp\n"
     << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output 'data.png'\n"
     << "set logscale xy\n"
     << "set xlabel 'r'\n"
     << "plot '" << u_csv << "' skip 1 using 1:2 with lines title 'u0', \\\n"
     << "     '" << w_csv << "' skip 1 using 1:2 with lines title 'w0'\n";
  return gp.str();
}

}  // namespace chemomass::cli
