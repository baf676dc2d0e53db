#include "reach/solver.hpp"

namespace reach {

std::string_view to_string(Status s) {
    switch (s) {
    case Status::Converged: return "Converged";
    case Status::Timeout: return "Timeout";
    case Status::BudgetExhausted: return "BudgetExhausted";
    case Status::NoConvergence: return "NoConvergence";
    case Status::Unguaranteed: return "Unguaranteed";
    }
    return "Unknown";
}

std::optional<Status> parse_status(std::string_view s) {
    for (Status st : {Status::Converged, Status::Timeout, Status::BudgetExhausted,
                      Status::NoConvergence, Status::Unguaranteed})
        if (to_string(st) == s) return st;
    return std::nullopt;
}

}  // namespace reach
