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

#pragma once

// Umbrella header for the lyapcert library.

#include "lyapcert/benchgen.hpp"
#include "lyapcert/bernstein.hpp"
#include "lyapcert/binomial.hpp"
#include "lyapcert/errors.hpp"
#include "lyapcert/io.hpp"
#include "lyapcert/lp.hpp"
#include "lyapcert/lyapunov.hpp"
#include "lyapcert/multi_index.hpp"
#include "lyapcert/ode.hpp"
#include "lyapcert/parametric.hpp"
#include "lyapcert/polynomial.hpp"
#include "lyapcert/relax.hpp"
#include "lyapcert/scalar.hpp"
