#pragma once

#include <algorithm>
#include <filesystem>

#include "harness.hpp"

namespace qxaccept {

struct Context {
  std::filesystem::path out;
  double budget_scale = 1.0;  // multiplies every wall-clock budget

  double budget(double seconds) const { return seconds * budget_scale; }
};

Verdict criterion_1(Context const& ctx);
Verdict criterion_2(Context const& ctx);
Verdict criterion_3(Context const& ctx);
Verdict criterion_4(Context const& ctx);
Verdict criterion_5(Context const& ctx);
Verdict criterion_6(Context const& ctx);
Verdict criterion_7(Context const& ctx);
Verdict criterion_8(Context const& ctx);
Verdict criterion_9(Context const& ctx);

}  // namespace qxaccept
