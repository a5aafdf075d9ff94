#ifndef QUCOIN_QSIM_H
#define QUCOIN_QSIM_H

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qucoin/f2linalg.h"
#include "qucoin/rng.h"

namespace qucoin {

/// Largest register the dense backend will allocate (2^16 amplitudes).
inline constexpr size_t kMaxStatevectorQubits = 16;
/// Largest subspace the symbolic backend will enumerate during a measurement.
inline constexpr size_t kMaxSymbolicEnumerationDim = 22;

using Amplitude = std::complex<double>;
using BitPredicate = std::function<bool(const BitVec &)>;

/// Dense state of `lambda` qubits. Amplitude index i is the basis state whose
/// bit string is the lambda-bit binary expansion of i, bit 0 most significant.
class StateVector {
   public:
    static StateVector basis(const BitVec &v);
    /// Rejects inputs whose norm differs from 1 by more than 1e-9.
    static StateVector from_amplitudes(size_t lambda, std::vector<Amplitude> amplitudes);

    size_t lambda() const {
        return lambda_;
    }
    std::span<const Amplitude> amplitudes() const {
        return amplitudes_;
    }
    Amplitude amplitude(const BitVec &v) const;
    double norm() const;
    /// Basis states with |amplitude|^2 above eps, in index order.
    std::vector<BitVec> support(double eps = 1e-18) const;

   private:
    StateVector(size_t lambda, std::vector<Amplitude> amplitudes);

    size_t lambda_;
    std::vector<Amplitude> amplitudes_;
};

/// Symbolic coset state: proportional to sum over s in `space` of
/// (-1)^<phase, s> |s xor shift>.
class CosetState {
   public:
    CosetState(Subspace space, BitVec shift, BitVec phase);

    size_t lambda() const {
        return space_.ambient();
    }
    const Subspace &space() const {
        return space_;
    }
    const BitVec &shift() const {
        return shift_;
    }
    const BitVec &phase() const {
        return phase_;
    }

   private:
    Subspace space_;
    BitVec shift_;
    BitVec phase_;
};

struct MeasurementOutcome {
    bool bit;
    StateVector post_state;
};

StateVector expand(const CosetState &c);
/// Inverse of expand() up to global phase, or nullopt when `s` is not a coset
/// state (support not affine, unequal magnitudes, or non-real relative phases).
std::optional<CosetState> recognize_coset_state(const StateVector &s, double tol = 1e-9);

StateVector hadamard_all(const StateVector &s);
/// H^{\otimes n} maps (S, x, z) to (S^perp, z, x) up to a global phase.
CosetState hadamard_all(const CosetState &c);

/// Two-outcome projective measurement {P, 1 - P} where P projects onto the
/// basis states accepted by `pred`. Outcome 1 means `pred` accepted.
MeasurementOutcome measure_predicate(const StateVector &s, const BitPredicate &pred, Rng &rng);

/// Full computational-basis measurement. The caller must treat the source
/// state as consumed.
BitVec measure_all(const StateVector &s, Rng &rng);
BitVec measure_all(const CosetState &c, Rng &rng);

/// |<a|b>|^2.
double fidelity(const StateVector &a, const StateVector &b);

/// Debug dump: [{"basis": "0101", "re": ..., "im": ...}, ...] over the support.
nlohmann::json dump_json(const StateVector &s);

/// Physical register of one token unit under either backend.
using UnitState = std::variant<StateVector, CosetState>;

struct UnitMeasurement {
    bool bit;
    UnitState post_state;
};

size_t lambda_of(const UnitState &s);
StateVector to_statevector(const UnitState &s);
UnitState hadamard_all(const UnitState &s);
BitVec measure_all(const UnitState &s, Rng &rng);

/// Symbolic states stay symbolic when the measured outcome set is affine,
/// which is always the case for coset predicates aligned with the state. A
/// non-affine outcome falls back to the dense backend when it fits and fails
/// with UnsupportedState otherwise.
UnitMeasurement measure_predicate(const UnitState &s, const BitPredicate &pred, Rng &rng);

}  // namespace qucoin

#endif
