#pragma once

#include <stdexcept>
#include <string>

namespace flf {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FLF_DECLARE_ERROR(Name)                  \
    class Name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

// sim-core
FLF_DECLARE_ERROR(InvalidArgument);
FLF_DECLARE_ERROR(ZeroKernel);
FLF_DECLARE_ERROR(DimensionMismatch);
FLF_DECLARE_ERROR(DisplacementTooLarge);
FLF_DECLARE_ERROR(FormatError);

// complexity
FLF_DECLARE_ERROR(ChannelMismatch);
FLF_DECLARE_ERROR(CenterOutOfBounds);
FLF_DECLARE_ERROR(IndivisibleScale);
FLF_DECLARE_ERROR(EncodeFailure);
FLF_DECLARE_ERROR(EmptyProfile);

// evolution
FLF_DECLARE_ERROR(InvalidSpace);
FLF_DECLARE_ERROR(EmptyPopulation);

// harness
FLF_DECLARE_ERROR(ConfigError);
FLF_DECLARE_ERROR(MissingStats);

#undef FLF_DECLARE_ERROR

}  // namespace flf
