#include "epimob/error.hpp"

namespace epimob {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NegativeOffDiagonal: return "NegativeOffDiagonal";
        case ErrorKind::NonzeroRowSum: return "NonzeroRowSum";
        case ErrorKind::NotIrreducible: return "NotIrreducible";
        case ErrorKind::TooFewNodes: return "TooFewNodes";
        case ErrorKind::IsolatedNode: return "IsolatedNode";
        case ErrorKind::AsymmetricGraph: return "AsymmetricGraph";
        case ErrorKind::ZeroTargetEntry: return "ZeroTargetEntry";
        case ErrorKind::ZeroPopulationEntry: return "ZeroPopulationEntry";
        case ErrorKind::NotMetzler: return "NotMetzler";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::StepTooLarge: return "StepTooLarge";
        case ErrorKind::UnknownFigure: return "UnknownFigure";
        case ErrorKind::InfeasibleMargin: return "InfeasibleMargin";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SingularMMatrix: return "SingularMMatrix";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::StateEscapedBox: return "StateEscapedBox";
        case ErrorKind::DegenerateSolution: return "DegenerateSolution";
        case ErrorKind::NotEndemicRegime: return "NotEndemicRegime";
    }
    return "Unknown";
}

}  // namespace epimob
