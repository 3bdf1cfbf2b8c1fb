#include "vinerisk/families.hpp"

#include <cctype>
#include <cmath>

#include "vinerisk/errors.hpp"

namespace vinerisk {

namespace {

const char* kind_name(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::independence: return "indep";
        case FamilyKind::gaussian: return "gaussian";
        case FamilyKind::clayton: return "clayton";
        case FamilyKind::gumbel: return "gumbel";
        case FamilyKind::frank: return "frank";
        case FamilyKind::joe: return "joe";
    }
    return "?";
}

} // namespace

ParamBounds param_bounds(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::independence: return {0.0, 0.0};
        case FamilyKind::gaussian: return {-0.9999, 0.9999};
        case FamilyKind::clayton: return {1e-4, 50.0};
        case FamilyKind::gumbel: return {1.0 + 1e-4, 50.0};
        case FamilyKind::frank: return {-35.0, 35.0};
        case FamilyKind::joe: return {1.0 + 1e-4, 50.0};
    }
    return {0.0, 0.0};
}

int param_count(FamilyKind kind) {
    return kind == FamilyKind::independence ? 0 : 1;
}

bool rotation_allowed(FamilyKind kind, int rotation) {
    if (rotation != 0 && rotation != 90 && rotation != 180 && rotation != 270)
        return false;
    switch (kind) {
        case FamilyKind::independence:
        case FamilyKind::gaussian:
        case FamilyKind::frank:
            return rotation == 0;
        default:
            return true;
    }
}

void check_theta(FamilyId family, double theta) {
    if (!rotation_allowed(family.kind, family.rotation))
        throw param_error(std::string("invalid rotation ") +
                          std::to_string(family.rotation) + " for family " +
                          kind_name(family.kind));
    if (family.kind == FamilyKind::independence) return;
    if (std::isnan(theta))
        throw param_error(std::string("theta is NaN for family ") +
                          kind_name(family.kind));
    ParamBounds b = param_bounds(family.kind);
    if (theta < b.lo || theta > b.hi)
        throw param_error(std::string("theta out of range for family ") +
                          kind_name(family.kind) + ": " + std::to_string(theta) +
                          " not in [" + std::to_string(b.lo) + ", " +
                          std::to_string(b.hi) + "]");
    if (family.kind == FamilyKind::frank && std::abs(theta) < 1e-4)
        throw param_error(
            "theta out of range for family frank: |theta| < 1e-4 (use indep)");
}

std::string to_token(FamilyId family) {
    std::string token = kind_name(family.kind);
    if (family.rotation != 0) token += std::to_string(family.rotation);
    return token;
}

FamilyId family_from_token(const std::string& token) {
    std::size_t digits = 0;
    while (digits < token.size() &&
           std::isdigit(static_cast<unsigned char>(token[token.size() - 1 - digits])))
        ++digits;
    std::string base = token.substr(0, token.size() - digits);
    int rotation = digits ? std::stoi(token.substr(token.size() - digits)) : 0;

    FamilyKind kind;
    if (base == "indep") kind = FamilyKind::independence;
    else if (base == "gaussian") kind = FamilyKind::gaussian;
    else if (base == "clayton") kind = FamilyKind::clayton;
    else if (base == "gumbel") kind = FamilyKind::gumbel;
    else if (base == "frank") kind = FamilyKind::frank;
    else if (base == "joe") kind = FamilyKind::joe;
    else throw param_error("unknown copula family token: " + token);

    FamilyId family{kind, rotation};
    if (!rotation_allowed(kind, rotation))
        throw param_error("invalid rotation in family token: " + token);
    return family;
}

const std::vector<FamilyId>& default_candidates() {
    static const std::vector<FamilyId> all = {
        {FamilyKind::independence, 0},
        {FamilyKind::gaussian, 0},
        {FamilyKind::clayton, 0},
        {FamilyKind::clayton, 90},
        {FamilyKind::clayton, 180},
        {FamilyKind::clayton, 270},
        {FamilyKind::gumbel, 0},
        {FamilyKind::gumbel, 90},
        {FamilyKind::gumbel, 180},
        {FamilyKind::gumbel, 270},
        {FamilyKind::frank, 0},
        {FamilyKind::joe, 0},
        {FamilyKind::joe, 90},
        {FamilyKind::joe, 180},
        {FamilyKind::joe, 270},
    };
    return all;
}

} // namespace vinerisk
