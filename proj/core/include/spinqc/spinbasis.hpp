#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spinqc {

using Complex = std::complex<double>;

// Largest chain any propagator accepts; the exact propagator is further
// limited to kMaxExactQubits.
inline constexpr int kMaxQubits = 20;
inline constexpr int kMaxExactQubits = 14;

inline constexpr std::size_t dimension(int L) { return std::size_t{1} << L; }

// A computational basis state |i_{L-1} ... i_1 i_0>. Bit k of `index` is the
// state of qubit k: 0 = ground (I^z = +1/2), 1 = excited (I^z = -1/2).
class BasisState {
public:
    BasisState(std::uint32_t index, int L);

    std::uint32_t index() const noexcept { return index_; }
    int qubits() const noexcept { return L_; }
    bool excited(int k) const;

    // Eigenvalue of I^z_k: +1/2 for a ground bit, -1/2 for an excited bit.
    double spin_z(int k) const;
    // Sum over all qubits of spin_z.
    double total_spin_z() const noexcept;
    BasisState flip(int k) const;

    // Bits printed qubit 0 first, matching how the protocol chain is written.
    std::string label() const;

    friend bool operator==(const BasisState&, const BasisState&) = default;

private:
    void check_qubit(int k) const;

    std::uint32_t index_;
    int L_;
};

// Free-function spellings used throughout the protocol code.
inline double spin_z(const BasisState& s, int k) { return s.spin_z(k); }
inline BasisState flip(const BasisState& s, int k) { return s.flip(k); }

// Bit twiddling shared by the propagators; no range checks.
inline double spin_z_bit(std::uint32_t index, int k) noexcept {
    return ((index >> k) & 1U) ? -0.5 : 0.5;
}
inline double total_spin_z_bits(std::uint32_t index, int L) noexcept {
    const int excited = __builtin_popcount(index & ((1U << L) - 1U));
    return 0.5 * (L - 2 * excited);
}

struct Frame {
    enum class Kind { lab, rotating };
    Kind kind = Kind::lab;
    double nu = 0.0;

    static Frame lab() { return {}; }
    static Frame rotating(double nu) { return {Kind::rotating, nu}; }
    bool is_lab() const noexcept { return kind == Kind::lab; }

    friend bool operator==(const Frame&, const Frame&) = default;
};

// 2^L amplitudes in a fixed global basis, the time they refer to and the
// frame they are expressed in.
class StateVector {
public:
    StateVector(int L, std::vector<Complex> amplitudes, double time = 0.0,
                Frame frame = Frame::lab());

    int qubits() const noexcept { return L_; }
    std::size_t size() const noexcept { return amps_.size(); }
    double time() const noexcept { return time_; }
    const Frame& frame() const noexcept { return frame_; }

    std::span<const Complex> amplitudes() const noexcept { return amps_; }
    std::span<Complex> amplitudes() noexcept { return amps_; }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }
    Complex& operator[](std::size_t i) { return amps_[i]; }

    double norm() const noexcept;
    double probability(std::size_t i) const { return std::norm(amps_[i]); }

    void set_time(double t) noexcept { time_ = t; }
    void set_frame(Frame f) noexcept { frame_ = f; }

private:
    int L_;
    std::vector<Complex> amps_;
    double time_;
    Frame frame_;
};

// |0...0> at t = 0 in the lab frame.
StateVector ground_state(int L);

// Throws CapacityError unless 1 <= L <= cap.
void check_capacity(int L, int cap = kMaxQubits);

}  // namespace spinqc
