#include "hyrl/region.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "hyrl/errors.hpp"

namespace hyrl {

Grid Grid::angular(int cells) {
  if (cells < 2) throw InvalidArgument("angular grid needs at least 2 cells");
  Grid g;
  g.kind = Kind::angular;
  g.n = cells;
  return g;
}

Grid Grid::box(int nx, int ny, double x0, double x1, double y0, double y1) {
  if (nx < 1 || ny < 1 || x1 <= x0 || y1 <= y0) throw InvalidArgument("bad box grid");
  Grid g;
  g.kind = Kind::box;
  g.nx = nx;
  g.ny = ny;
  g.x0 = x0;
  g.x1 = x1;
  g.y0 = y0;
  g.y1 = y1;
  return g;
}

double Grid::cell_width() const {
  return kind == Kind::angular ? kTwoPi / n : (x1 - x0) / nx;
}

int Grid::cell_of_angle(double theta) const {
  double t = wrap_angle(theta);
  int i = static_cast<int>(std::floor(t / kTwoPi * n));
  return std::min(i, n - 1);
}

int Grid::cell_of_xy(double x, double y) const {
  double fx = (x - x0) / (x1 - x0) * nx;
  double fy = (y - y0) / (y1 - y0) * ny;
  int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, nx - 1);
  int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, ny - 1);
  return iy * nx + ix;
}

int Grid::cell_of(const Vec2& state) const {
  return kind == Kind::angular ? cell_of_angle(angle_of(state)) : cell_of_xy(state.x, state.y);
}

double Grid::cell_center_angle(int idx) const {
  return (idx + 0.5) * kTwoPi / n;
}

void Grid::cell_center_xy(int idx, double& cx, double& cy) const {
  int ix = idx % nx, iy = idx / nx;
  cx = x0 + (ix + 0.5) * (x1 - x0) / nx;
  cy = y0 + (iy + 0.5) * (y1 - y0) / ny;
}

Vec2 Grid::cell_center(int idx) const {
  if (kind == Kind::angular) return unit_from_angle(cell_center_angle(idx));
  double cx, cy;
  cell_center_xy(idx, cx, cy);
  return {cx, cy};
}

bool Grid::cell_valid(int idx) const {
  if (kind == Kind::angular || !has_blocked) return true;
  double cx, cy;
  cell_center_xy(idx, cx, cy);
  return !(cx >= bx0 && cx <= bx1 && cy >= by0 && cy <= by1);
}

int Grid::valid_cell_count() const {
  int c = 0;
  for (int i = 0; i < cell_count(); ++i)
    if (cell_valid(i)) ++c;
  return c;
}

std::vector<int> Grid::neighbors(int idx) const {
  std::vector<int> out;
  if (kind == Kind::angular) {
    if (idx > 0) out.push_back(idx - 1);
    if (idx + 1 < n) out.push_back(idx + 1);
    return out;
  }
  int ix = idx % nx, iy = idx / nx;
  if (ix > 0) out.push_back(idx - 1);
  if (ix + 1 < nx) out.push_back(idx + 1);
  if (iy > 0) out.push_back(idx - nx);
  if (iy + 1 < ny) out.push_back(idx + nx);
  return out;
}

bool Grid::same_geometry(const Grid& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::angular) return n == o.n;
  return nx == o.nx && ny == o.ny && x0 == o.x0 && x1 == o.x1 && y0 == o.y0 && y1 == o.y1 &&
         has_blocked == o.has_blocked && bx0 == o.bx0 && bx1 == o.bx1 && by0 == o.by0 &&
         by1 == o.by1;
}

bool Region::contains(const Vec2& state) const {
  return cells_[grid_.cell_of(state)] != 0;
}

int Region::cell_count() const {
  int c = 0;
  for (uint8_t v : cells_) c += v;
  return c;
}

std::vector<int> Region::cells() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(cells_.size()); ++i)
    if (cells_[i]) out.push_back(i);
  return out;
}

void Region::check_compatible(const Region& o) const {
  if (!grid_.same_geometry(o.grid_)) throw InvalidArgument("region grids differ");
}

Region Region::unite(const Region& o) const {
  check_compatible(o);
  Region r(grid_);
  for (size_t i = 0; i < cells_.size(); ++i) r.cells_[i] = cells_[i] | o.cells_[i];
  return r;
}

Region Region::intersect(const Region& o) const {
  check_compatible(o);
  Region r(grid_);
  for (size_t i = 0; i < cells_.size(); ++i) r.cells_[i] = cells_[i] & o.cells_[i];
  return r;
}

Region Region::complement() const {
  Region r(grid_);
  for (size_t i = 0; i < cells_.size(); ++i)
    r.cells_[i] = (!cells_[i] && grid_.cell_valid(static_cast<int>(i))) ? 1 : 0;
  return r;
}

Region Region::difference(const Region& o) const {
  check_compatible(o);
  Region r(grid_);
  for (size_t i = 0; i < cells_.size(); ++i) r.cells_[i] = (cells_[i] && !o.cells_[i]) ? 1 : 0;
  return r;
}

bool Region::equals(const Region& o) const {
  check_compatible(o);
  return cells_ == o.cells_;
}

bool Region::subset_of(const Region& o) const {
  check_compatible(o);
  for (size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i] && !o.cells_[i]) return false;
  return true;
}

Region Region::inner_boundary() const {
  Region r(grid_);
  for (int i = 0; i < static_cast<int>(cells_.size()); ++i) {
    if (!cells_[i]) continue;
    for (int nb : grid_.neighbors(i)) {
      if (grid_.cell_valid(nb) && !cells_[nb]) {
        r.set_cell(i, true);
        break;
      }
    }
  }
  return r;
}

Region Region::closed_complement() const {
  return complement().unite(inner_boundary());
}

std::vector<Region> Region::components() const {
  std::vector<Region> out;
  std::vector<char> seen(cells_.size(), 0);
  for (int start = 0; start < static_cast<int>(cells_.size()); ++start) {
    if (seen[start] || !cells_[start] || !grid_.cell_valid(start)) continue;
    Region comp(grid_);
    std::deque<int> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      int i = queue.front();
      queue.pop_front();
      comp.set_cell(i, true);
      for (int nb : grid_.neighbors(i)) {
        if (!seen[nb] && cells_[nb] && grid_.cell_valid(nb)) {
          seen[nb] = 1;
          queue.push_back(nb);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<std::pair<double, double>> Region::angular_intervals() const {
  if (grid_.kind != Grid::Kind::angular)
    throw InvalidArgument("angular_intervals on a box region");
  std::vector<std::pair<double, double>> out;
  double h = grid_.cell_width();
  int i = 0;
  while (i < grid_.n) {
    if (!cells_[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < grid_.n && cells_[j + 1]) ++j;
    out.emplace_back(i * h, (j + 1) * h);
    i = j + 1;
  }
  return out;
}

std::string Region::summary() const {
  std::ostringstream os;
  if (grid_.kind == Grid::Kind::angular) {
    os << "angular region, " << cell_count() << "/" << grid_.n << " cells;";
    for (auto [lo, hi] : angular_intervals()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), " [%.4f, %.4f]pi", lo / kPi, hi / kPi);
      os << buf;
    }
  } else {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int i = 0; i < grid_.cell_count(); ++i) {
      if (!cells_[i]) continue;
      double cx, cy;
      grid_.cell_center_xy(i, cx, cy);
      double hw = grid_.cell_width() / 2.0, hh = (grid_.y1 - grid_.y0) / grid_.ny / 2.0;
      xmin = std::min(xmin, cx - hw);
      xmax = std::max(xmax, cx + hw);
      ymin = std::min(ymin, cy - hh);
      ymax = std::max(ymax, cy + hh);
    }
    os << "box region, " << cell_count() << "/" << grid_.valid_cell_count() << " valid cells";
    if (cell_count() > 0) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "; bounds x [%.3f, %.3f] y [%.3f, %.3f]", xmin, xmax,
                    ymin, ymax);
      os << buf;
    }
  }
  return os.str();
}

std::string Region::serialize() const {
  std::ostringstream os;
  os << "hyrl-region 1\n";
  if (grid_.kind == Grid::Kind::angular) {
    os << "geometry angular " << grid_.n << "\n";
  } else {
    os << "geometry box " << grid_.nx << " " << grid_.ny << " " << format_double(grid_.x0)
       << " " << format_double(grid_.x1) << " " << format_double(grid_.y0) << " "
       << format_double(grid_.y1) << "\n";
    if (grid_.has_blocked)
      os << "blocked " << format_double(grid_.bx0) << " " << format_double(grid_.bx1) << " "
         << format_double(grid_.by0) << " " << format_double(grid_.by1) << "\n";
  }
  // run-length encoding: "value count" pairs over the flat cell array
  os << "labels";
  int i = 0, total = grid_.cell_count();
  while (i < total) {
    int j = i;
    while (j + 1 < total && cells_[j + 1] == cells_[i]) ++j;
    os << " " << static_cast<int>(cells_[i]) << "x" << (j - i + 1);
    i = j + 1;
  }
  os << "\n# " << summary() << "\n";
  return os.str();
}

Region Region::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int version = 0;
  in >> tag >> version;
  if (tag != "hyrl-region" || version != 1) throw InvalidArgument("not a hyrl-region v1 file");
  std::string key;
  in >> key;
  if (key != "geometry") throw InvalidArgument("region file missing geometry");
  std::string kind;
  in >> kind;
  Grid grid;
  if (kind == "angular") {
    int n;
    in >> n;
    grid = Grid::angular(n);
  } else if (kind == "box") {
    int nx, ny;
    double x0, x1, y0, y1;
    in >> nx >> ny >> x0 >> x1 >> y0 >> y1;
    grid = Grid::box(nx, ny, x0, x1, y0, y1);
  } else {
    throw InvalidArgument("unknown region geometry " + kind);
  }
  in >> key;
  if (key == "blocked") {
    if (kind != "box") throw InvalidArgument("blocked rect on non-box grid");
    grid.has_blocked = true;
    in >> grid.bx0 >> grid.bx1 >> grid.by0 >> grid.by1;
    in >> key;
  }
  if (key != "labels") throw InvalidArgument("region file missing labels");
  Region r(grid);
  int filled = 0;
  std::string run;
  while (filled < grid.cell_count() && in >> run) {
    auto x = run.find('x');
    if (x == std::string::npos) throw InvalidArgument("bad RLE run " + run);
    int value = std::stoi(run.substr(0, x));
    int count = std::stoi(run.substr(x + 1));
    if (value != 0 && value != 1) throw InvalidArgument("bad RLE value");
    for (int k = 0; k < count; ++k) r.set_cell(filled++, value != 0);
  }
  if (filled != grid.cell_count()) throw InvalidArgument("region RLE does not cover the grid");
  return r;
}

void Region::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << serialize();
}

Region Region::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

Vec2 sample_state_in(const Region& region, Rng& rng) {
  std::vector<int> cells = region.cells();
  if (cells.empty()) throw InvalidArgument("cannot sample from an empty region");
  const Grid& g = region.grid();
  int idx = cells[rng.uniform_int(0, static_cast<int>(cells.size()) - 1)];
  if (g.kind == Grid::Kind::angular)
    return unit_from_angle((idx + rng.uniform01()) * g.cell_width());
  int ix = idx % g.nx, iy = idx / g.nx;
  double wx = (g.x1 - g.x0) / g.nx, wy = (g.y1 - g.y0) / g.ny;
  return {g.x0 + (ix + rng.uniform01()) * wx, g.y0 + (iy + rng.uniform01()) * wy};
}

}  // namespace hyrl
