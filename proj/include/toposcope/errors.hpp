#ifndef TOPOSCOPE_ERRORS_HPP
#define TOPOSCOPE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace toposcope {

struct ToposError : std::runtime_error {
    explicit ToposError(const std::string& msg) : std::runtime_error(msg) {}
};

#define TOPOSCOPE_ERROR(Name)                                              \
    struct Name : ToposError {                                             \
        explicit Name(const std::string& msg) : ToposError(#Name ": " + msg) {} \
    }

TOPOSCOPE_ERROR(MissingComposite);
TOPOSCOPE_ERROR(AssocViolation);
TOPOSCOPE_ERROR(IdViolation);
TOPOSCOPE_ERROR(UnknownObject);
TOPOSCOPE_ERROR(UnknownMorphism);
TOPOSCOPE_ERROR(SizeOverflow);
TOPOSCOPE_ERROR(TargetMismatch);
TOPOSCOPE_ERROR(BaseMismatch);
TOPOSCOPE_ERROR(NotASieve);
TOPOSCOPE_ERROR(NotSifted);
TOPOSCOPE_ERROR(NotSaturated);
TOPOSCOPE_ERROR(NotARelation);
TOPOSCOPE_ERROR(NotASheaf);
TOPOSCOPE_ERROR(NotASiteMorphism);
TOPOSCOPE_ERROR(NoTerminal);
TOPOSCOPE_ERROR(OreViolation);
TOPOSCOPE_ERROR(InvalidTree);
TOPOSCOPE_ERROR(ValidationError);

#undef TOPOSCOPE_ERROR

} // namespace toposcope

#endif
