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

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "airhia/geometry.hpp"

using namespace airhia;

namespace {

Ring square_ring(double x0, double y0, double side) {
    return {{x0, y0},
            {x0 + side, y0},
            {x0 + side, y0 + side},
            {x0, y0 + side},
            {x0, y0}};
}

}  // namespace

TEST_CASE("ring_signed_area orientation") {
    Ring ccw = square_ring(0, 0, 1);
    CHECK(ring_signed_area(ccw) == doctest::Approx(1.0));
    Ring cw(ccw.rbegin(), ccw.rend());
    CHECK(ring_signed_area(cw) == doctest::Approx(-1.0));
}

TEST_CASE("make_polygon normalizes orientation") {
    Ring cw_exterior{{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}};
    Ring ccw_hole{{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75},
                  {0.25, 0.25}};
    const Polygon polygon = make_polygon(cw_exterior, {ccw_hole});
    CHECK(ring_signed_area(polygon.rings[0]) > 0.0);
    CHECK(ring_signed_area(polygon.rings[1]) < 0.0);
    CHECK(polygon_area(polygon) == doctest::Approx(0.75));
}

TEST_CASE("validate_polygon rejects bad rings") {
    Polygon open;
    open.rings.push_back({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK_THROWS_AS(validate_polygon(open), std::invalid_argument);

    Polygon tiny;
    tiny.rings.push_back({{0, 0}, {1, 0}, {0, 0}});
    CHECK_THROWS_AS(validate_polygon(tiny), std::invalid_argument);

    CHECK_NOTHROW(validate_polygon(make_polygon(square_ring(0, 0, 1))));
}

TEST_CASE("clipped_ring_area against a cell rectangle") {
    const Rect cell{0, 0, 1, 1};

    SUBCASE("square equal to the cell") {
        CHECK(clipped_ring_area(square_ring(0, 0, 1), cell) ==
              doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("rectangle covering the left half") {
        Ring half{{-2, 0}, {0.5, 0}, {0.5, 1}, {-2, 1}, {-2, 0}};
        CHECK(clipped_ring_area(half, cell) ==
              doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("diamond at edge midpoints covers half the cell") {
        Ring diamond{{0.5, 0}, {1, 0.5}, {0.5, 1}, {0, 0.5}, {0.5, 0}};
        CHECK(clipped_ring_area(diamond, cell) ==
              doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("disjoint ring clips to nothing") {
        CHECK(clipped_ring_area(square_ring(5, 5, 1), cell) == 0.0);
    }
    SUBCASE("clockwise ring keeps its negative sign") {
        Ring ccw = square_ring(0.25, 0.25, 0.5);
        Ring cw(ccw.rbegin(), ccw.rend());
        CHECK(clipped_ring_area(cw, cell) == doctest::Approx(-0.25));
    }
}

TEST_CASE("hole subtracts from the clipped area") {
    const Rect cell{0, 0, 2, 2};
    const Polygon with_hole =
        make_polygon(square_ring(0, 0, 2), {square_ring(0.5, 0.5, 1)});
    double area = 0.0;
    for (const auto& ring : with_hole.rings) {
        area += clipped_ring_area(ring, cell);
    }
    CHECK(area == doctest::Approx(3.0).epsilon(1e-14));
}
