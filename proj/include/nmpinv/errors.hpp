#pragma once

#include <stdexcept>
#include <string>

namespace nmpinv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define NMPINV_DEFINE_ERROR(Name) \
    struct Name : Error {         \
        using Error::Error;       \
    }

// polylti
NMPINV_DEFINE_ERROR(NonConvergence);
NMPINV_DEFINE_ERROR(ImproperSystem);
NMPINV_DEFINE_ERROR(DegenerateApproximation);
NMPINV_DEFINE_ERROR(PoleAtOne);
NMPINV_DEFINE_ERROR(InsufficientPreview);
NMPINV_DEFINE_ERROR(PoleOnUnitCircle);

// plantsim
NMPINV_DEFINE_ERROR(NonFiniteState);
NMPINV_DEFINE_ERROR(NonFiniteJacobian);
NMPINV_DEFINE_ERROR(Uncontrollable);

// mlp
NMPINV_DEFINE_ERROR(DimensionMismatch);
NMPINV_DEFINE_ERROR(NonFiniteLoss);

// invlearn
NMPINV_DEFINE_ERROR(BaselineDiverged);
NMPINV_DEFINE_ERROR(LogTooShort);
NMPINV_DEFINE_ERROR(WindowLength);

// experiment / cli / service
NMPINV_DEFINE_ERROR(EmptyWindow);
NMPINV_DEFINE_ERROR(ConfigError);
NMPINV_DEFINE_ERROR(IoError);
NMPINV_DEFINE_ERROR(BadDrawing);

#undef NMPINV_DEFINE_ERROR

}  // namespace nmpinv
