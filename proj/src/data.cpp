#include "sisomap/data.hpp"

#include "sisomap/random.hpp"

#include <array>
#include <charconv>
#include <complex>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

namespace sisomap {

// ---------------------------------------------------------------------------
// Fresnel integrals

namespace {

using Complex = std::complex<double>;

struct SimpsonPanel {
  double a, m, b;
  Complex fa, fm, fb, whole;
};

template <typename F>
SimpsonPanel make_panel(const F& f, double a, Complex fa, double b, Complex fb) {
  const double m = 0.5 * (a + b);
  const Complex fm = f(m);
  return {a, m, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)};
}

// Bisects until the Richardson estimate |S2 - S1| / 15 is within the local
// tolerance, then returns the extrapolated value S2 + (S2 - S1) / 15. Panels
// whose estimate is already at rounding level are accepted as well, so tiny
// tolerances terminate.
template <typename F>
Complex adaptive_simpson(const F& f, const SimpsonPanel& p, double tol, int depth) {
  const SimpsonPanel left = make_panel(f, p.a, p.fa, p.m, p.fm);
  const SimpsonPanel right = make_panel(f, p.m, p.fm, p.b, p.fb);
  const Complex refined = left.whole + right.whole;
  const Complex delta = refined - p.whole;
  const double err = std::abs(delta);
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * (p.b - p.a);
  if (depth <= 0 || err <= 15.0 * tol || err <= rounding) return refined + delta / 15.0;
  return adaptive_simpson(f, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, right, 0.5 * tol, depth - 1);
}

// The integrand oscillates with local frequency ~ s / pi; seeding the recursion
// with panels no wider than a fraction of a period keeps the first error
// estimates from being fooled by aliasing.
template <typename F>
Complex integrate(const F& f, double t, double tol) {
  if (t == 0.0) return 0.0;
  const double span = std::abs(t);
  const int panels = std::max(1, static_cast<int>(std::ceil(span * (span + 1.0) * 2.0)));
  const double h = t / panels;
  const double panel_tol = tol / panels;
  Complex sum = 0.0;
  double a = 0.0;
  Complex fa = f(a);
  for (int i = 0; i < panels; ++i) {
    const double b = (i + 1 == panels) ? t : (i + 1) * h;
    const Complex fb = f(b);
    sum += adaptive_simpson(f, make_panel(f, a, fa, b, fb), panel_tol, 50);
    a = b;
    fa = fb;
  }
  return sum;
}

// Requests looser than this are still evaluated to it, so the result does not
// depend on tol and a tighter tol can never give a worse answer.
constexpr double kFresnelWorkingTol = 1e-13;

}  // namespace

FresnelPair fresnel(double t, double tol) {
  if (!std::isfinite(t)) throw InvalidArgument("fresnel: t must be finite");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw InvalidArgument("fresnel: tol must be positive");
  // exp(i s^2) = cos(s^2) + i sin(s^2): one pass gives both integrals.
  const Complex v = integrate([](double s) { return std::polar(1.0, s * s); }, t,
                              std::min(tol, kFresnelWorkingTol));
  return {v.imag(), v.real()};
}

// ---------------------------------------------------------------------------
// Swiss roll

Eigen::Vector3d swiss_roll_point(double t, double r, double amplitude) {
  const FresnelPair f = fresnel(t);
  return {amplitude * f.x, amplitude * f.y, amplitude * r};
}

SwissRoll gen_swiss_roll(Index n, Seed seed, const SwissRollOptions& options) {
  if (n < 1) throw InvalidArgument("gen_swiss_roll: n must be >= 1");
  if (!(options.noise_sd >= 0.0) || !std::isfinite(options.noise_sd))
    throw InvalidArgument("gen_swiss_roll: noise_sd must be >= 0");
  if (!(options.amplitude > 0.0) || !std::isfinite(options.amplitude))
    throw InvalidArgument("gen_swiss_roll: amplitude must be > 0");

  SwissRoll roll;
  GroundTruth& truth = roll.truth;
  truth.coords.resize(n, 2);
  roll.points.resize(n, 3);

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    const double t = truth.t_min + (truth.t_max - truth.t_min) * unit(rng);
    const double r = truth.r_min + (truth.r_max - truth.r_min) * unit(rng);
    truth.coords(i, 0) = t;
    truth.coords(i, 1) = r;
    roll.points.row(i) = swiss_roll_point(t, r, options.amplitude).transpose();
  }

  if (options.noise_sd > 0.0) {
    // Separate stream so that the clean surface does not depend on noise_sd.
    Rng noise_rng(derive_seed(seed, 0x6e6f697365ULL));
    std::normal_distribution<double> gauss(0.0, options.noise_sd);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < 3; ++j) roll.points(i, j) += gauss(noise_rng);
  }
  return roll;
}

// ---------------------------------------------------------------------------
// IDX

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  std::uint32_t u32(const char* field) {
    std::array<unsigned char, 4> b{};
    const std::int64_t at = offset_;
    if (!in_.read(reinterpret_cast<char*>(b.data()), 4))
      throw DataError(std::string("idx: truncated header, missing ") + field, at);
    offset_ += 4;
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
           std::uint32_t{b[3]};
  }

  void bytes(std::vector<std::uint8_t>& out, std::size_t n) {
    out.resize(n);
    in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got != n)
      throw DataError("idx: truncated payload, expected " + std::to_string(n) + " bytes, got " +
                          std::to_string(got),
                      offset_ + static_cast<std::int64_t>(got));
    offset_ += static_cast<std::int64_t>(n);
  }

  std::int64_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::int64_t offset_ = 0;
};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                              static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b.data(), 4);
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

IdxImages read_idx_images(std::istream& in) {
  ByteReader reader(in);
  const std::uint32_t magic = reader.u32("magic");
  if (magic != kImagesMagic) {
    std::ostringstream msg;
    msg << "idx: bad image magic 0x" << std::hex << magic;
    throw DataError(msg.str(), 0);
  }
  IdxImages images;
  images.count = reader.u32("image count");
  images.rows = reader.u32("row count");
  images.cols = reader.u32("column count");

  // Guard the size product before allocating; 2^31 bytes is far beyond any IDX image set.
  const std::uint64_t per_image = std::uint64_t{images.rows} * images.cols;
  const std::uint64_t total = per_image * images.count;
  constexpr std::uint64_t kMaxBytes = std::uint64_t{1} << 31;
  if (images.rows == 0 || images.cols == 0 || per_image > kMaxBytes || total > kMaxBytes)
    throw DataError("idx: image dimensions overflow or are zero", 4);

  reader.bytes(images.pixels, static_cast<std::size_t>(total));
  return images;
}

IdxImages read_idx_images(const std::filesystem::path& path) {
  auto in = open_binary(path);
  return read_idx_images(in);
}

std::vector<std::uint8_t> read_idx_labels(std::istream& in) {
  ByteReader reader(in);
  const std::uint32_t magic = reader.u32("magic");
  if (magic != kLabelsMagic) {
    std::ostringstream msg;
    msg << "idx: bad label magic 0x" << std::hex << magic;
    throw DataError(msg.str(), 0);
  }
  const std::uint32_t count = reader.u32("label count");
  if (count > (std::uint32_t{1} << 31)) throw DataError("idx: label count overflow", 4);
  std::vector<std::uint8_t> labels;
  reader.bytes(labels, count);
  return labels;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
  auto in = open_binary(path);
  return read_idx_labels(in);
}

void write_idx_images(std::ostream& out, const IdxImages& images) {
  if (images.pixels.size() != std::size_t{images.count} * images.rows * images.cols)
    throw InvalidArgument("write_idx_images: pixel count does not match header");
  put_u32(out, kImagesMagic);
  put_u32(out, images.count);
  put_u32(out, images.rows);
  put_u32(out, images.cols);
  out.write(reinterpret_cast<const char*>(images.pixels.data()),
            static_cast<std::streamsize>(images.pixels.size()));
}

void write_idx_labels(std::ostream& out, const std::vector<std::uint8_t>& labels) {
  put_u32(out, kLabelsMagic);
  put_u32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
}

LabeledData load_idx(const std::filesystem::path& images_path, const IdxLoadOptions& options) {
  if (options.label_filter && !options.labels_path)
    throw InvalidArgument("load_idx: label_filter requires a label file");
  if (options.max_rows && *options.max_rows < 0)
    throw InvalidArgument("load_idx: max_rows must be non-negative");

  const IdxImages images = read_idx_images(images_path);
  std::vector<std::uint8_t> labels;
  if (options.labels_path) {
    labels = read_idx_labels(*options.labels_path);
    if (labels.size() != images.count)
      throw DataError("load_idx: " + std::to_string(labels.size()) + " labels for " +
                      std::to_string(images.count) + " images");
  }

  std::vector<Index> keep;
  keep.reserve(images.count);
  for (Index i = 0; i < static_cast<Index>(images.count); ++i) {
    if (options.max_rows && static_cast<Index>(keep.size()) >= *options.max_rows) break;
    if (options.label_filter && labels[static_cast<std::size_t>(i)] != *options.label_filter)
      continue;
    keep.push_back(i);
  }

  const Index dim = Index{images.rows} * images.cols;
  LabeledData out;
  out.X.resize(static_cast<Index>(keep.size()), dim);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::uint8_t* src = images.pixels.data() + keep[r] * dim;
    for (Index j = 0; j < dim; ++j) out.X(static_cast<Index>(r), j) = src[j] / 255.0;
    if (!labels.empty()) out.labels.push_back(labels[static_cast<std::size_t>(keep[r])]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

DataMatrix read_csv(std::istream& in) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    Index count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      std::string_view field = rest.substr(0, comma);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
        throw DataError("csv: bad number '" + std::string(field) + "' on line " +
                        std::to_string(line_no));
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols < 0) cols = count;
    if (count != cols)
      throw DataError("csv: line " + std::to_string(line_no) + " has " + std::to_string(count) +
                      " fields, expected " + std::to_string(cols));
    ++rows;
  }
  if (rows == 0) throw DataError("csv: no samples");
  return Eigen::Map<const DataMatrix>(values.data(), rows, cols);
}

DataMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_csv(in);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& out, const Eigen::Ref<const ColMatrix<double>>& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Stream simulation

StreamSource make_stream(const DataMatrix& X, Index batch_size, Seed seed) {
  const Index n = X.rows();
  if (batch_size < 1 || batch_size >= n)
    throw InvalidArgument("make_stream: batch_size must be in [1, n)");
  Rng rng(seed);
  StreamSource s;
  s.seed = seed;
  s.order = random_permutation(n, rng);
  const std::vector<Index> head(s.order.begin(), s.order.begin() + batch_size);
  const std::vector<Index> tail(s.order.begin() + batch_size, s.order.end());
  s.batch = take_rows(X, head);
  s.remainder = take_rows(X, tail);
  return s;
}

}  // namespace sisomap
