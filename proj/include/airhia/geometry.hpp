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

#pragma once

#include <vector>

namespace airhia {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Closed ring: front() == back(), at least 4 points.
using Ring = std::vector<Point>;

struct Rect {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    bool intersects(const Rect& other) const {
        return xmin < other.xmax && other.xmin < xmax && ymin < other.ymax &&
               other.ymin < ymax;
    }
};

/// Planar polygon carried as signed rings: counter-clockwise rings add area,
/// clockwise rings subtract (holes). Multi-part geometries are represented by
/// several additive rings in one Polygon. Self-intersecting rings are not
/// detected; all areas follow signed-area arithmetic.
struct Polygon {
    std::vector<Ring> rings;
};

/// Shoelace area; positive for counter-clockwise rings.
double ring_signed_area(const Ring& ring);

/// Build a polygon from an exterior ring and optional holes, normalizing
/// orientation (exterior counter-clockwise, holes clockwise).
Polygon make_polygon(Ring exterior, std::vector<Ring> holes = {});

/// Append another exterior+holes part to an existing polygon (MultiPolygon).
void add_polygon_part(Polygon& polygon, Ring exterior,
                      std::vector<Ring> holes = {});

/// Net signed area over all rings.
double polygon_area(const Polygon& polygon);

Rect polygon_bbox(const Polygon& polygon);

/// Throws std::invalid_argument when a ring is open, has fewer than 4
/// points, or an additive ring has zero area.
void validate_polygon(const Polygon& polygon);

/// Signed area of ring ∩ rect via half-plane clipping against the four rect
/// edges. Exact for polygonal input up to floating-point rounding; the sign
/// follows the ring orientation.
double clipped_ring_area(const Ring& ring, const Rect& rect);

Polygon translate(const Polygon& polygon, double dx, double dy);

}  // namespace airhia
