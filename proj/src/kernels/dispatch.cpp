#include <cstdlib>
#include <string>

#include "cohset/errors.hpp"
#include "cohset/kernels/advect.hpp"

namespace cohset {

std::string_view to_string(KernelKind kind) { return kind == KernelKind::avx2 ? "avx2" : "scalar"; }

KernelPreference kernel_preference_from_string(std::string_view name) {
  if (name == "auto" || name.empty()) return KernelPreference::automatic;
  if (name == "scalar") return KernelPreference::scalar;
  if (name == "avx2") return KernelPreference::avx2;
  throw ConfigError("unknown kernel '" + std::string(name) + "' (expected auto, scalar or avx2)");
}

bool avx2_available() {
#if defined(COHSET_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

KernelKind select_kernel(KernelPreference pref) {
  if (pref == KernelPreference::automatic) {
    if (const char* env = std::getenv("COHSET_KERNEL")) pref = kernel_preference_from_string(env);
  }
  switch (pref) {
    case KernelPreference::scalar: return KernelKind::scalar;
    case KernelPreference::avx2:
      if (!avx2_available()) throw ConfigError("avx2 kernel requested but not available on this machine");
      return KernelKind::avx2;
    case KernelPreference::automatic: break;
  }
  return avx2_available() ? KernelKind::avx2 : KernelKind::scalar;
}

void advect(KernelKind kind, const AdvectPlan& plan, AdvectBatch& batch) {
  if (batch.snap_x.size() != plan.record_after.size() || batch.snap_y.size() != plan.record_after.size()) {
    throw DomainError("advect: snapshot count does not match the plan");
  }
  if (kind == KernelKind::avx2) {
    advect_avx2(plan, batch);
  } else {
    advect_scalar(plan, batch);
  }
}

}  // namespace cohset
