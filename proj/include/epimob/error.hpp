#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace epimob {

enum class ErrorKind {
    // input validation
    InvalidArgument,
    NegativeOffDiagonal,
    NonzeroRowSum,
    NotIrreducible,
    TooFewNodes,
    IsolatedNode,
    AsymmetricGraph,
    ZeroTargetEntry,
    ZeroPopulationEntry,
    NotMetzler,
    GridMismatch,
    StepTooLarge,
    UnknownFigure,
    InfeasibleMargin,
    // numerical failure
    NoConvergence,
    SingularMMatrix,
    SingularSystem,
    StateEscapedBox,
    DegenerateSolution,
    // regime
    NotEndemicRegime,
};

std::string_view to_string(ErrorKind kind);

/// Library error: a kind for programmatic handling plus an optional index
/// (row, node, or field position) for the offending item.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what,
          std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          kind_(kind),
          index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
};

}  // namespace epimob
