#pragma once

#include <string>
#include <vector>

namespace vinerisk {

enum class FamilyKind {
    independence,
    gaussian,
    clayton,
    gumbel,
    frank,
    joe,
};

// A one-parameter pair-copula family plus a rotation in {0, 90, 180, 270}
// degrees.  Gaussian and Frank cover negative dependence through the sign of
// their parameter and only admit rotation 0; the asymmetric families get the
// other quadrants via rotation.
struct FamilyId {
    FamilyKind kind = FamilyKind::independence;
    int rotation = 0;

    friend bool operator==(const FamilyId&, const FamilyId&) = default;
};

struct ParamBounds {
    double lo = 0.0;
    double hi = 0.0;
};

// Admissible closed parameter interval used by both validation and the
// likelihood optimizer.
ParamBounds param_bounds(FamilyKind kind);

int param_count(FamilyKind kind); // 0 for independence, 1 otherwise

bool rotation_allowed(FamilyKind kind, int rotation);

// Throws param_error naming the family and the violated bound.  Frank
// additionally rejects |theta| < 1e-4 (the independence limit is served by
// the independence family).
void check_theta(FamilyId family, double theta);

// Serialization tokens: "indep", "gaussian", "frank", and "clayton",
// "gumbel", "joe" with an optional rotation suffix ("clayton90", "joe270").
std::string to_token(FamilyId family);
FamilyId family_from_token(const std::string& token);

// Fixed enumeration order used everywhere a candidate set is implied:
// independence, gaussian, clayton (0/90/180/270), gumbel (0/90/180/270),
// frank, joe (0/90/180/270).  Ties in model selection resolve to the earlier
// entry, so the order is part of the contract.
const std::vector<FamilyId>& default_candidates();

} // namespace vinerisk
