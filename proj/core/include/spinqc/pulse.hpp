#pragma once

#include <cstdint>
#include <optional>

namespace spinqc {

// The single-spin transition a pulse is tuned to: flip `qubit` of the basis
// state `source`.
struct Transition {
    std::uint32_t source = 0;
    int qubit = 0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

// One rectangular rf pulse, active on (t_start, t_start + duration].
struct Pulse {
    double nu = 0.0;        // carrier frequency
    double omega = 0.0;     // Rabi frequency
    double phi = 0.0;       // carrier phase
    double duration = 0.0;
    double t_start = 0.0;
    std::optional<Transition> target;

    double t_end() const noexcept { return t_start + duration; }
};

}  // namespace spinqc
