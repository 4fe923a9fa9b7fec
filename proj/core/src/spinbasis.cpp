#include "spinqc/spinbasis.hpp"

#include <cmath>
#include <numeric>

#include "spinqc/errors.hpp"

namespace spinqc {

void check_capacity(int L, int cap) {
    if (L < 1 || L > cap) {
        throw CapacityError("chain length L=" + std::to_string(L) +
                            " outside supported range [1, " + std::to_string(cap) + "]");
    }
}

BasisState::BasisState(std::uint32_t index, int L) : index_(index), L_(L) {
    check_capacity(L);
    if (index >= dimension(L)) {
        throw ArgumentError("basis index " + std::to_string(index) + " >= 2^" +
                            std::to_string(L));
    }
}

void BasisState::check_qubit(int k) const {
    if (k < 0 || k >= L_) {
        throw ArgumentError("qubit index " + std::to_string(k) + " outside [0, " +
                            std::to_string(L_) + ")");
    }
}

bool BasisState::excited(int k) const {
    check_qubit(k);
    return (index_ >> k) & 1U;
}

double BasisState::spin_z(int k) const {
    check_qubit(k);
    return spin_z_bit(index_, k);
}

double BasisState::total_spin_z() const noexcept { return total_spin_z_bits(index_, L_); }

BasisState BasisState::flip(int k) const {
    check_qubit(k);
    return BasisState(index_ ^ (1U << k), L_);
}

std::string BasisState::label() const {
    std::string out;
    out.reserve(static_cast<std::size_t>(L_));
    for (int k = 0; k < L_; ++k) out.push_back(((index_ >> k) & 1U) ? '1' : '0');
    return out;
}

StateVector::StateVector(int L, std::vector<Complex> amplitudes, double time, Frame frame)
    : L_(L), amps_(std::move(amplitudes)), time_(time), frame_(frame) {
    check_capacity(L);
    if (amps_.size() != dimension(L)) {
        throw ArgumentError("state vector has " + std::to_string(amps_.size()) +
                            " amplitudes, expected 2^" + std::to_string(L));
    }
}

double StateVector::norm() const noexcept {
    const double sq = std::accumulate(amps_.begin(), amps_.end(), 0.0,
                                      [](double acc, const Complex& c) { return acc + std::norm(c); });
    return std::sqrt(sq);
}

StateVector ground_state(int L) {
    check_capacity(L);
    std::vector<Complex> amps(dimension(L));
    amps[0] = 1.0;
    return StateVector(L, std::move(amps));
}

}  // namespace spinqc
