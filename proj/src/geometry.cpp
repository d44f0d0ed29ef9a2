// Copyright (c) 2026 airhia contributors.
// All rights reserved.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "airhia/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace airhia {

double ring_signed_area(const Ring& ring) {
    if (ring.size() < 3) return 0.0;
    // Shoelace relative to the first vertex for numerical stability.
    const double ox = ring.front().x;
    const double oy = ring.front().y;
    double twice_area = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double x0 = ring[i].x - ox;
        const double y0 = ring[i].y - oy;
        const double x1 = ring[i + 1].x - ox;
        const double y1 = ring[i + 1].y - oy;
        twice_area += x0 * y1 - x1 * y0;
    }
    return 0.5 * twice_area;
}

namespace {

void orient(Ring& ring, bool counter_clockwise) {
    const double area = ring_signed_area(ring);
    if ((counter_clockwise && area < 0.0) ||
        (!counter_clockwise && area > 0.0)) {
        std::reverse(ring.begin(), ring.end());
    }
}

}  // namespace

Polygon make_polygon(Ring exterior, std::vector<Ring> holes) {
    Polygon polygon;
    add_polygon_part(polygon, std::move(exterior), std::move(holes));
    return polygon;
}

void add_polygon_part(Polygon& polygon, Ring exterior,
                      std::vector<Ring> holes) {
    orient(exterior, true);
    polygon.rings.push_back(std::move(exterior));
    for (auto& hole : holes) {
        orient(hole, false);
        polygon.rings.push_back(std::move(hole));
    }
}

double polygon_area(const Polygon& polygon) {
    double area = 0.0;
    for (const auto& ring : polygon.rings) area += ring_signed_area(ring);
    return area;
}

Rect polygon_bbox(const Polygon& polygon) {
    Rect box{std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};
    for (const auto& ring : polygon.rings) {
        for (const auto& p : ring) {
            box.xmin = std::min(box.xmin, p.x);
            box.ymin = std::min(box.ymin, p.y);
            box.xmax = std::max(box.xmax, p.x);
            box.ymax = std::max(box.ymax, p.y);
        }
    }
    return box;
}

void validate_polygon(const Polygon& polygon) {
    if (polygon.rings.empty()) {
        throw std::invalid_argument("polygon has no rings");
    }
    for (const auto& ring : polygon.rings) {
        if (ring.size() < 4) {
            throw std::invalid_argument("ring has fewer than 4 points");
        }
        if (ring.front().x != ring.back().x ||
            ring.front().y != ring.back().y) {
            throw std::invalid_argument("ring is not closed");
        }
    }
}

namespace {

enum class Edge { Left, Right, Bottom, Top };

bool inside(const Point& p, Edge edge, const Rect& rect) {
    switch (edge) {
        case Edge::Left: return p.x >= rect.xmin;
        case Edge::Right: return p.x <= rect.xmax;
        case Edge::Bottom: return p.y >= rect.ymin;
        case Edge::Top: return p.y <= rect.ymax;
    }
    return false;
}

Point intersect(const Point& a, const Point& b, Edge edge, const Rect& rect) {
    switch (edge) {
        case Edge::Left: {
            const double t = (rect.xmin - a.x) / (b.x - a.x);
            return {rect.xmin, a.y + t * (b.y - a.y)};
        }
        case Edge::Right: {
            const double t = (rect.xmax - a.x) / (b.x - a.x);
            return {rect.xmax, a.y + t * (b.y - a.y)};
        }
        case Edge::Bottom: {
            const double t = (rect.ymin - a.y) / (b.y - a.y);
            return {a.x + t * (b.x - a.x), rect.ymin};
        }
        case Edge::Top: {
            const double t = (rect.ymax - a.y) / (b.y - a.y);
            return {a.x + t * (b.x - a.x), rect.ymax};
        }
    }
    return a;
}

void clip_against(const std::vector<Point>& in, Edge edge, const Rect& rect,
                  std::vector<Point>& out) {
    out.clear();
    const std::size_t n = in.size();
    if (n == 0) return;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& current = in[i];
        const Point& previous = in[(i + n - 1) % n];
        const bool current_in = inside(current, edge, rect);
        const bool previous_in = inside(previous, edge, rect);
        if (current_in) {
            if (!previous_in) out.push_back(intersect(previous, current, edge, rect));
            out.push_back(current);
        } else if (previous_in) {
            out.push_back(intersect(previous, current, edge, rect));
        }
    }
}

}  // namespace

double clipped_ring_area(const Ring& ring, const Rect& rect) {
    if (ring.size() < 4) return 0.0;
    // Open representation (drop the closing vertex) for the cyclic clip.
    std::vector<Point> a(ring.begin(), ring.end() - 1);
    std::vector<Point> b;
    b.reserve(a.size() + 4);
    clip_against(a, Edge::Left, rect, b);
    clip_against(b, Edge::Right, rect, a);
    clip_against(a, Edge::Bottom, rect, b);
    clip_against(b, Edge::Top, rect, a);
    if (a.size() < 3) return 0.0;
    // Shoelace relative to the rect corner; every clipped vertex lies within
    // the rect, so the products stay at cell scale.
    double twice_area = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t j = (i + 1) % a.size();
        const double x0 = a[i].x - rect.xmin;
        const double y0 = a[i].y - rect.ymin;
        const double x1 = a[j].x - rect.xmin;
        const double y1 = a[j].y - rect.ymin;
        twice_area += x0 * y1 - x1 * y0;
    }
    return 0.5 * twice_area;
}

Polygon translate(const Polygon& polygon, double dx, double dy) {
    Polygon out = polygon;
    for (auto& ring : out.rings) {
        for (auto& p : ring) {
            p.x += dx;
            p.y += dy;
        }
    }
    return out;
}

}  // namespace airhia
