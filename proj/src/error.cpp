#include "thetaconf/error.hpp"

namespace thetaconf {

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::OrientationMismatch: return "OrientationMismatch";
    case ErrorKind::BoundaryVertex: return "BoundaryVertex";
    case ErrorKind::BrokenFan: return "BrokenFan";
    case ErrorKind::PointAtInfinity: return "PointAtInfinity";
    case ErrorKind::SingularMap: return "SingularMap";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::BoundaryEdge: return "BoundaryEdge";
    case ErrorKind::NonConvexQuad: return "NonConvexQuad";
    case ErrorKind::NonCommutingSimilarities: return "NonCommutingSimilarities";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::SumConstraintViolated: return "SumConstraintViolated";
    case ErrorKind::DegenerateCircle: return "DegenerateCircle";
    case ErrorKind::SeedInconsistent: return "SeedInconsistent";
    case ErrorKind::ProductConstraintViolated: return "ProductConstraintViolated";
    case ErrorKind::DegenerateImage: return "DegenerateImage";
    case ErrorKind::NearDegenerate: return "NearDegenerate";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::InfeasibleStep: return "InfeasibleStep";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::InfeasibleTriangle: return "InfeasibleTriangle";
    case ErrorKind::AnchorDegenerate: return "AnchorDegenerate";
    case ErrorKind::CombinatoricsMismatch: return "CombinatoricsMismatch";
    }
    return "Error";
}

} // namespace thetaconf
