#include "panogeo/pano.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "panogeo/binio.hpp"

namespace panogeo {

namespace {

constexpr double kBlendEps = 1e-6;

int wrap_index(int x, int n) {
  x %= n;
  return x < 0 ? x + n : x;
}

double wrap_coordinate(double x, double n) {
  const double w = x - n * std::floor(x / n);
  return w == n ? 0.0 : w;
}

}  // namespace

CameraParams PanoLayout::view_params() const {
  CameraParams p;
  p.fov_deg = fov_deg;
  p.phi_deg = 0.0;
  p.psi_deg = 0.0;
  p.width = view_size;
  p.height = view_size;
  return p;
}

void PanoLayout::validate() const {
  if (num_views <= 0 || view_size <= 0)
    throw std::invalid_argument("PanoLayout: non-positive counts");
  if (std::abs(num_views * yaw_step_deg - 360.0) > 1e-9)
    throw std::invalid_argument("PanoLayout: views must cover 360 degrees");
  if (fov_deg <= 0.0 || fov_deg >= 180.0)
    throw std::invalid_argument("PanoLayout: fov out of range");
}

double CorrespondenceMap::visible_fraction() const {
  if (visible.empty()) return 0.0;
  std::size_t n = 0;
  for (std::uint8_t f : visible) n += f != 0;
  return static_cast<double>(n) / static_cast<double>(visible.size());
}

double CorrespondenceMap::center_row_visible_fraction() const {
  if (width <= 0 || height <= 0) return 0.0;
  const int rows[2] = {(height - 1) / 2, height / 2};
  const int nrows = rows[0] == rows[1] ? 1 : 2;
  std::size_t n = 0;
  for (int r = 0; r < nrows; ++r)
    for (int x = 0; x < width; ++x) n += visible[index(x, rows[r])] != 0;
  return static_cast<double>(n) / static_cast<double>(nrows * width);
}

namespace {

// column_shift is applied to the integer sample columns, after the bilinear
// weights are fixed; whole-column shifts therefore never perturb the weights
double sample_equirect_cols(const ImageRaster& pano, double u, double v,
                            int column_shift, double* out) {
  const int c = pano.channels;
  for (int k = 0; k < c; ++k) out[k] = 0.0;

  v = std::clamp(v, 0.0, static_cast<double>(pano.height - 1));
  const double fy = std::floor(v);
  const int y0 = static_cast<int>(fy);
  const double ay = v - fy;

  const double fx = std::floor(u);
  const int x0i = static_cast<int>(fx) + column_shift;
  const double ax = u - fx;

  const double wts[4] = {(1.0 - ax) * (1.0 - ay), ax * (1.0 - ay),
                         (1.0 - ax) * ay, ax * ay};
  const int xs[4] = {x0i, x0i + 1, x0i, x0i + 1};
  const int ys[4] = {y0, y0, y0 + 1, y0 + 1};

  double validity = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (wts[i] == 0.0) continue;
    const int x = wrap_index(xs[i], pano.width);
    const int y = std::min(ys[i], pano.height - 1);
    if (!pano.valid(x, y)) continue;
    validity += wts[i];
    const double* src = pano.data.data() + pano.pixel_index(x, y) * c;
    for (int k = 0; k < c; ++k) out[k] += wts[i] * src[k];
  }
  return validity;
}

}  // namespace

double sample_equirect(const ImageRaster& pano, double u, double v,
                       double* out) {
  return sample_equirect_cols(pano, u, v, 0, out);
}

ImageRaster equirect_to_view(const ImageRaster& pano, const PanoLayout& layout,
                             int view) {
  layout.validate();
  if (pano.width != 2 * pano.height)
    throw std::invalid_argument("equirect_to_view: panorama must be 2:1");

  const CameraParams vp = layout.view_params();
  const Intrinsics k = intrinsics_from_params(vp);
  const int w = pano.width;
  const int h = pano.height;

  // Integer column shift keeps yaw symmetry pixel-exact when the panorama
  // width divides evenly across the views: the bilinear weights come from
  // the view-local column alone and the shift moves whole columns.
  const bool exact_shift = w % layout.num_views == 0;
  const int ishift = exact_shift ? view * (w / layout.num_views) : 0;
  const double fshift = exact_shift ? 0.0 : layout.yaw_deg(view) / 360.0 * w;

  ImageRaster img = ImageRaster::zeros(vp.width, vp.height, pano.channels);
  std::vector<double> px(static_cast<std::size_t>(pano.channels), 0.0);
  for (int y = 0; y < vp.height; ++y) {
    for (int x = 0; x < vp.width; ++x) {
      const Eigen::Vector3d d((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
      const double lon_local = std::atan2(d.x(), d.z());
      const double lat = std::asin(-d.y() / d.norm());
      const double u = (lon_local / (2.0 * kPi) + 0.5) * w - 0.5 + fshift;
      const double v = (0.5 - lat / kPi) * h - 0.5;
      const double validity = sample_equirect_cols(pano, u, v, ishift, px.data());
      const std::size_t pi = img.pixel_index(x, y);
      if (validity < kValidityThreshold) {
        img.mask[pi] = 0;
        continue;
      }
      for (int c = 0; c < pano.channels; ++c)
        img.data[pi * pano.channels + c] = px[c] / validity;
    }
  }
  return img;
}

std::vector<ImageRaster> equirect_to_views(const ImageRaster& pano,
                                           const PanoLayout& layout) {
  std::vector<ImageRaster> views;
  views.reserve(layout.num_views);
  for (int i = 0; i < layout.num_views; ++i)
    views.push_back(equirect_to_view(pano, layout, i));
  return views;
}

ImageRaster views_to_equirect(const std::vector<ImageRaster>& views,
                              const PanoLayout& layout, int out_width,
                              int out_height) {
  layout.validate();
  if (static_cast<int>(views.size()) != layout.num_views)
    throw std::invalid_argument("views_to_equirect: wrong view count");
  for (const auto& v : views)
    if (v.width != layout.view_size || v.height != layout.view_size)
      throw std::invalid_argument("views_to_equirect: view size mismatch");

  const int channels = views[0].channels;
  const CameraParams vp = layout.view_params();
  const Intrinsics k = intrinsics_from_params(vp);
  ImageRaster out = ImageRaster::zeros(out_width, out_height, channels);

  struct Contribution {
    double local_x;  // sort key: view-local wrapped column
    double weight;
    std::vector<double> color;
  };
  std::vector<Contribution> contribs;
  std::vector<double> px(static_cast<std::size_t>(channels), 0.0);

  // Wrapped view-local column; wrapping happens on exact integers when the
  // width divides across the views, so pixels related by a whole yaw step
  // see bit-identical arithmetic and stitching is shift-equivariant.
  const bool exact_step = out_width % layout.num_views == 0;
  const int istep = exact_step ? out_width / layout.num_views : 0;

  for (int y = 0; y < out_height; ++y) {
    const double lat = (0.5 - (y + 0.5) / out_height) * kPi;
    const double cl = std::cos(lat);
    const double sl = std::sin(lat);
    for (int x = 0; x < out_width; ++x) {
      contribs.clear();
      for (int i = 0; i < layout.num_views; ++i) {
        const double local_x =
            exact_step
                ? static_cast<double>(wrap_index(x - i * istep, out_width))
                : wrap_coordinate(x - i * (static_cast<double>(out_width) /
                                           layout.num_views),
                                  out_width);
        const double lon_local = ((local_x + 0.5) / out_width - 0.5) * 2.0 * kPi;
        const Eigen::Vector3d d(std::sin(lon_local) * cl, -sl,
                                std::cos(lon_local) * cl);
        if (d.z() <= kBehindCameraEps) continue;
        const double u = k.fx * d.x() / d.z() + k.cx;
        const double v = k.fy * d.y() / d.z() + k.cy;
        if (u < 0.0 || u > vp.width - 1.0 || v < 0.0 || v > vp.height - 1.0)
          continue;
        const double validity = sample_bilinear(views[i], u, v, px.data());
        if (validity < kValidityThreshold) continue;
        Contribution c;
        c.local_x = local_x;
        c.weight = 1.0 / (std::acos(std::clamp(d.z(), -1.0, 1.0)) *
                              std::acos(std::clamp(d.z(), -1.0, 1.0)) +
                          kBlendEps);
        c.color.assign(px.begin(), px.end());
        for (double& ch : c.color) ch /= validity;
        contribs.push_back(std::move(c));
      }
      const std::size_t pi = out.pixel_index(x, y);
      if (contribs.empty()) {
        out.mask[pi] = 0;
        continue;
      }
      std::sort(contribs.begin(), contribs.end(),
                [](const Contribution& a, const Contribution& b) {
                  return a.local_x < b.local_x;
                });
      double wsum = 0.0;
      std::vector<double> acc(static_cast<std::size_t>(channels), 0.0);
      for (const auto& c : contribs) {
        wsum += c.weight;
        for (int ch = 0; ch < channels; ++ch) acc[ch] += c.weight * c.color[ch];
      }
      for (int ch = 0; ch < channels; ++ch)
        out.data[pi * channels + ch] = acc[ch] / wsum;
    }
  }
  return out;
}

namespace {

Eigen::Matrix3d yaw_pair_matrix(int source_view, int target_view,
                                const PanoLayout& layout) {
  const Intrinsics k = intrinsics_from_params(layout.view_params());
  const int delta = wrap_index(target_view - source_view, layout.num_views);
  const Eigen::Matrix3d r =
      rotation_from_angles(0.0, 0.0, layout.yaw_step_deg * delta);
  return k.matrix() * r * k.inverse_matrix();
}

CorrespondenceMap map_from_matrix(const Eigen::Matrix3d& m, int width,
                                  int height, int source_width,
                                  int source_height, int source_id,
                                  int target_id) {
  CorrespondenceMap map;
  map.width = width;
  map.height = height;
  map.source_id = source_id;
  map.target_id = target_id;
  map.source_width = source_width;
  map.source_height = source_height;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  map.u.assign(n, 0.0);
  map.v.assign(n, 0.0);
  map.visible.assign(n, 0);
  // The raw matrix keeps the projective sign: w <= 0 is behind the source
  // camera. An h22-normalized Homography would lose that distinction.
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Eigen::Vector3d q = m * Eigen::Vector3d(x, y, 1.0);
      if (q.z() <= kBehindCameraEps) continue;
      const double u = q.x() / q.z();
      const double v = q.y() / q.z();
      const bool inside = u >= 0.0 && u <= source_width - 1.0 && v >= 0.0 &&
                          v <= source_height - 1.0;
      if (!inside) continue;
      const std::size_t i = map.index(x, y);
      map.u[i] = u;
      map.v[i] = v;
      map.visible[i] = 1;
    }
  }
  return map;
}

}  // namespace

Homography pair_homography(int source_view, int target_view,
                           const PanoLayout& layout) {
  return Homography(yaw_pair_matrix(source_view, target_view, layout));
}

CorrespondenceMap build_correspondence(int source_view, int target_view,
                                       const PanoLayout& layout) {
  layout.validate();
  if (source_view < 0 || source_view >= layout.num_views || target_view < 0 ||
      target_view >= layout.num_views)
    throw std::invalid_argument("build_correspondence: view index out of range");
  return map_from_matrix(yaw_pair_matrix(source_view, target_view, layout),
                         layout.view_size, layout.view_size, layout.view_size,
                         layout.view_size, source_view, target_view);
}

CorrespondenceMap build_correspondence(const CameraParams& input,
                                       int target_view,
                                       const PanoLayout& layout) {
  layout.validate();
  if (target_view < 0 || target_view >= layout.num_views)
    throw std::invalid_argument("build_correspondence: view index out of range");
  const Homography h =
      homography_from_params(input, CameraParams::canonical(layout.view_size));
  const Eigen::Matrix3d m =
      h.inverse().matrix() * yaw_pair_matrix(0, target_view, layout);
  return map_from_matrix(m, layout.view_size, layout.view_size, input.width,
                         input.height, kInputViewId, target_view);
}

Neighborhood gather_neighborhood(const CorrespondenceMap& map, int x, int y,
                                 int k) {
  if (k <= 0 || k % 2 == 0)
    throw std::invalid_argument("gather_neighborhood: K must be odd");
  Neighborhood n;
  n.k = k;
  const std::size_t i = map.index(x, y);
  if (!map.visible[i]) return n;
  n.visible = true;
  const int cx = static_cast<int>(std::lround(map.u[i]));
  const int cy = static_cast<int>(std::lround(map.v[i]));
  const int r = k / 2;
  n.positions.reserve(static_cast<std::size_t>(k) * k);
  n.valid.reserve(static_cast<std::size_t>(k) * k);
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int px = cx + dx;
      const int py = cy + dy;
      n.positions.emplace_back(px, py);
      n.valid.push_back(px >= 0 && px < map.source_width && py >= 0 &&
                        py < map.source_height);
    }
  }
  return n;
}

void save_cmap(const std::filesystem::path& path, const CorrespondenceMap& map) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_cmap: cannot open " + path.string());
  os.write("CMAP", 4);
  put_le<std::uint32_t>(os, 1);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(map.width));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(map.height));
  put_le<std::int32_t>(os, map.source_id);
  put_le<std::int32_t>(os, map.target_id);
  const std::size_t n = static_cast<std::size_t>(map.width) * map.height;
  for (std::size_t i = 0; i < n; ++i) {
    put_le<float>(os, static_cast<float>(map.u[i]));
    put_le<float>(os, static_cast<float>(map.v[i]));
    put_le<std::uint8_t>(os, map.visible[i]);
  }
  if (!os) throw std::runtime_error("save_cmap: write failed for " + path.string());
}

CorrespondenceMap load_cmap(const std::filesystem::path& path, int source_width,
                            int source_height) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_cmap: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "CMAP", 4) != 0)
    throw std::runtime_error("load_cmap: bad magic in " + path.string());
  const auto version = get_le<std::uint32_t>(is);
  if (version != 1)
    throw std::runtime_error("load_cmap: unsupported version in " + path.string());
  CorrespondenceMap map;
  map.width = static_cast<int>(get_le<std::uint32_t>(is));
  map.height = static_cast<int>(get_le<std::uint32_t>(is));
  map.source_id = get_le<std::int32_t>(is);
  map.target_id = get_le<std::int32_t>(is);
  if (map.width <= 0 || map.height <= 0 || map.width > (1 << 20) ||
      map.height > (1 << 20))
    throw std::runtime_error("load_cmap: implausible header in " + path.string());
  map.source_width = source_width;
  map.source_height = source_height;
  const std::size_t n = static_cast<std::size_t>(map.width) * map.height;
  map.u.resize(n);
  map.v.resize(n);
  map.visible.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    map.u[i] = get_le<float>(is);
    map.v[i] = get_le<float>(is);
    map.visible[i] = get_le<std::uint8_t>(is);
  }
  if (!is) throw std::runtime_error("load_cmap: truncated file " + path.string());
  return map;
}

}  // namespace panogeo
