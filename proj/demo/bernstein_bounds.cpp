// Copyright 2026 The lyapcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Lower bounds from each relaxation on a few small polynomials, and the
// effect of raising the Bernstein degree.

#include <cstdio>
#include <string>

#include "lyapcert/lyapcert.hpp"

using namespace lyapcert;

int main() {
  struct Case {
    const char* text;
    Box box;
    MultiIndex degree;
  };
  const Case cases[] = {
      {"4*x^2 - 4*x + 1", Box::cube(1, 0, 1), MultiIndex{2}},
      {"x^2 + y^2", Box::cube(2, -1, 1), MultiIndex{2, 2}},
      {"x^3 - x*y + y^2 - 0.2", Box::cube(2, -1, 1), MultiIndex{3, 3}},
  };
  std::printf("%-24s %10s %10s %10s %10s %10s\n", "polynomial", "interval", "lp1", "lp2", "lp3", "lp3-full");
  for (const auto& c : cases) {
    const Polynomial<double> p = parse_polynomial(c.text, c.box.dim());
    std::printf("%-24s %10.4f %10.4f %10.4f %10.4f %10.4f\n", c.text, lower_bound(p, c.box, RelaxMethod::interval()),
                lower_bound(p, c.box, RelaxMethod::lp1(c.degree)), lower_bound(p, c.box, RelaxMethod::lp2(c.degree)),
                lower_bound(p, c.box, RelaxMethod::lp3(c.degree)),
                lower_bound(p, c.box, RelaxMethod::lp3(c.degree, RecurrenceLevels::Full)));
  }

  std::printf("\nLP1 for x^2 + y^2 on [-1,1]^2 as the degree grows:\n");
  const Polynomial<double> q = parse_polynomial("x^2 + y^2", 2);
  for (int k : {2, 4, 8, 16, 32})
    std::printf("  delta = (%2d,%2d)  bound %.6f\n", k, k, lower_bound(q, Box::cube(2, -1, 1), RelaxMethod::lp1(MultiIndex{k, k})));
  return 0;
}
