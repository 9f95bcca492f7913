#pragma once

#include <stdexcept>
#include <string>

namespace thetaconf {

enum class ErrorKind {
    InvalidInput,
    NonManifoldEdge,
    DegenerateTriangle,
    OrientationMismatch,
    BoundaryVertex,
    BrokenFan,
    PointAtInfinity,
    SingularMap,
    CoincidentPoints,
    BoundaryEdge,
    NonConvexQuad,
    NonCommutingSimilarities,
    ConstraintViolation,
    Infeasible,
    SumConstraintViolated,
    DegenerateCircle,
    SeedInconsistent,
    ProductConstraintViolated,
    DegenerateImage,
    NearDegenerate,
    NotConverged,
    InfeasibleStep,
    OutsideDomain,
    InfeasibleTriangle,
    AnchorDegenerate,
    CombinatoricsMismatch,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

    // Triangle, edge or vertex the failure refers to, -1 if none.
    int where = -1;

private:
    ErrorKind kind_;
};

} // namespace thetaconf
