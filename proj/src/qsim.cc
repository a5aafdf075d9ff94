#include "qucoin/qsim.h"

#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "qucoin/errors.h"

namespace qucoin {

namespace {

void check_dense_capacity(size_t lambda) {
    if (lambda > kMaxStatevectorQubits) {
        throw Error(
            ErrorCode::kBackendCapacity, "statevector backend supports at most " +
                                             std::to_string(kMaxStatevectorQubits) + " qubits, got " +
                                             std::to_string(lambda));
    }
}

double sign_of(bool odd) {
    return odd ? -1.0 : 1.0;
}

// Born-rule choice between two outcomes with unnormalized weights p0, p1.
// An outcome of numerically zero weight is never selected.
bool sample_outcome(double p0, double p1, Rng &rng) {
    double total = p0 + p1;
    bool bit = rng.unit() * total < p1;
    if (bit && p1 <= 0) {
        bit = false;
    } else if (!bit && p0 <= 0) {
        bit = true;
    }
    return bit;
}

// Affine hull check: a set of 2^k points is a coset iff the differences from
// its first point span exactly k dimensions.
std::optional<std::pair<Subspace, BitVec>> as_coset(const std::vector<BitVec> &points, size_t lambda) {
    if (points.empty() || !std::has_single_bit(points.size())) {
        return std::nullopt;
    }
    F2Matrix diffs(lambda);
    for (size_t i = 1; i < points.size(); i++) {
        diffs.push_row(points[i] ^ points[0]);
    }
    Subspace span = Subspace::span(diffs);
    if ((size_t{1} << span.dim()) != points.size()) {
        return std::nullopt;
    }
    return std::make_pair(std::move(span), points[0]);
}

}  // namespace

StateVector::StateVector(size_t lambda, std::vector<Amplitude> amplitudes)
    : lambda_(lambda), amplitudes_(std::move(amplitudes)) {
}

StateVector StateVector::basis(const BitVec &v) {
    check_dense_capacity(v.size());
    std::vector<Amplitude> amps(size_t{1} << v.size(), 0.0);
    amps[v.to_index()] = 1.0;
    return StateVector(v.size(), std::move(amps));
}

StateVector StateVector::from_amplitudes(size_t lambda, std::vector<Amplitude> amplitudes) {
    check_dense_capacity(lambda);
    if (amplitudes.size() != (size_t{1} << lambda)) {
        throw Error(ErrorCode::kLengthMismatch, "expected 2^" + std::to_string(lambda) + " amplitudes");
    }
    StateVector s(lambda, std::move(amplitudes));
    if (std::abs(s.norm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::kInvalidArgument, "state is not normalized");
    }
    return s;
}

Amplitude StateVector::amplitude(const BitVec &v) const {
    if (v.size() != lambda_) {
        throw Error(ErrorCode::kLengthMismatch, "basis vector length differs from register size");
    }
    return amplitudes_[v.to_index()];
}

double StateVector::norm() const {
    double n = 0;
    for (const auto &a : amplitudes_) {
        n += std::norm(a);
    }
    return std::sqrt(n);
}

std::vector<BitVec> StateVector::support(double eps) const {
    std::vector<BitVec> out;
    for (size_t i = 0; i < amplitudes_.size(); i++) {
        if (std::norm(amplitudes_[i]) > eps) {
            out.push_back(BitVec::from_index(i, lambda_));
        }
    }
    return out;
}

CosetState::CosetState(Subspace space, BitVec shift, BitVec phase)
    : space_(std::move(space)), shift_(std::move(shift)), phase_(std::move(phase)) {
    if (shift_.size() != space_.ambient() || phase_.size() != space_.ambient()) {
        throw Error(ErrorCode::kLengthMismatch, "coset state shift/phase length differs from ambient dimension");
    }
}

StateVector expand(const CosetState &c) {
    size_t lambda = c.lambda();
    check_dense_capacity(lambda);
    std::vector<Amplitude> amps(size_t{1} << lambda, 0.0);
    double mag = std::pow(2.0, -0.5 * static_cast<double>(c.space().dim()));
    for (uint64_t k = 0; k < (uint64_t{1} << c.space().dim()); k++) {
        BitVec s = c.space().element(k);
        amps[(s ^ c.shift()).to_index()] = mag * sign_of(c.phase().dot(s));
    }
    return StateVector::from_amplitudes(lambda, std::move(amps));
}

std::optional<CosetState> recognize_coset_state(const StateVector &s, double tol) {
    size_t lambda = s.lambda();
    std::vector<BitVec> points = s.support(tol * tol);
    auto coset = as_coset(points, lambda);
    if (!coset) {
        return std::nullopt;
    }
    auto &[space, origin] = *coset;
    Amplitude ref = s.amplitude(origin);
    // Relative signs on the basis rows fix the phase vector at pivot positions.
    BitVec phase(lambda);
    for (size_t i = 0; i < space.dim(); i++) {
        Amplitude ratio = s.amplitude(origin ^ space.basis().row(i)) / ref;
        if (ratio.real() < 0) {
            phase.set(space.pivots()[i], true);
        }
    }
    CosetState candidate(space, origin, phase);
    if (fidelity(expand(candidate), s) < 1 - tol) {
        return std::nullopt;
    }
    return candidate;
}

StateVector hadamard_all(const StateVector &s) {
    std::vector<Amplitude> a(s.amplitudes().begin(), s.amplitudes().end());
    const double r = 1.0 / std::sqrt(2.0);
    for (size_t h = 1; h < a.size(); h <<= 1) {
        for (size_t i = 0; i < a.size(); i += h << 1) {
            for (size_t j = i; j < i + h; j++) {
                Amplitude x = a[j];
                Amplitude y = a[j + h];
                a[j] = (x + y) * r;
                a[j + h] = (x - y) * r;
            }
        }
    }
    return StateVector::from_amplitudes(s.lambda(), std::move(a));
}

CosetState hadamard_all(const CosetState &c) {
    return CosetState(dual(c.space()), c.phase(), c.shift());
}

MeasurementOutcome measure_predicate(const StateVector &s, const BitPredicate &pred, Rng &rng) {
    auto amps = s.amplitudes();
    std::vector<bool> accepted(amps.size(), false);
    double p0 = 0;
    double p1 = 0;
    for (size_t i = 0; i < amps.size(); i++) {
        double p = std::norm(amps[i]);
        if (p == 0) {
            continue;
        }
        accepted[i] = pred(BitVec::from_index(i, s.lambda()));
        (accepted[i] ? p1 : p0) += p;
    }
    bool bit = sample_outcome(p0, p1, rng);
    double scale = 1.0 / std::sqrt(bit ? p1 : p0);
    std::vector<Amplitude> post(amps.size(), 0.0);
    for (size_t i = 0; i < amps.size(); i++) {
        if (amps[i] != Amplitude(0) && accepted[i] == bit) {
            post[i] = amps[i] * scale;
        }
    }
    return MeasurementOutcome{bit, StateVector::from_amplitudes(s.lambda(), std::move(post))};
}

BitVec measure_all(const StateVector &s, Rng &rng) {
    auto amps = s.amplitudes();
    double total = 0;
    for (const auto &a : amps) {
        total += std::norm(a);
    }
    double target = rng.unit() * total;
    size_t last_nonzero = 0;
    double acc = 0;
    for (size_t i = 0; i < amps.size(); i++) {
        double p = std::norm(amps[i]);
        if (p == 0) {
            continue;
        }
        last_nonzero = i;
        acc += p;
        if (target < acc) {
            return BitVec::from_index(i, s.lambda());
        }
    }
    return BitVec::from_index(last_nonzero, s.lambda());
}

BitVec measure_all(const CosetState &c, Rng &rng) {
    uint64_t coefficients = 0;
    for (size_t i = 0; i < c.space().dim(); i++) {
        coefficients |= static_cast<uint64_t>(rng.bit()) << i;
    }
    return c.space().element(coefficients) ^ c.shift();
}

double fidelity(const StateVector &a, const StateVector &b) {
    if (a.lambda() != b.lambda()) {
        throw Error(ErrorCode::kLengthMismatch, "fidelity between registers of different size");
    }
    Amplitude inner = 0;
    auto x = a.amplitudes();
    auto y = b.amplitudes();
    for (size_t i = 0; i < x.size(); i++) {
        inner += std::conj(x[i]) * y[i];
    }
    return std::min(1.0, std::norm(inner));
}

nlohmann::json dump_json(const StateVector &s) {
    nlohmann::json out = nlohmann::json::array();
    auto amps = s.amplitudes();
    for (size_t i = 0; i < amps.size(); i++) {
        if (amps[i] == Amplitude(0)) {
            continue;
        }
        out.push_back({{"basis", BitVec::from_index(i, s.lambda()).str()}, {"re", amps[i].real()}, {"im", amps[i].imag()}});
    }
    return out;
}

size_t lambda_of(const UnitState &s) {
    return std::visit([](const auto &st) { return st.lambda(); }, s);
}

StateVector to_statevector(const UnitState &s) {
    if (const auto *sv = std::get_if<StateVector>(&s)) {
        return *sv;
    }
    return expand(std::get<CosetState>(s));
}

UnitState hadamard_all(const UnitState &s) {
    return std::visit([](const auto &st) -> UnitState { return hadamard_all(st); }, s);
}

BitVec measure_all(const UnitState &s, Rng &rng) {
    return std::visit([&](const auto &st) { return measure_all(st, rng); }, s);
}

UnitMeasurement measure_predicate(const UnitState &s, const BitPredicate &pred, Rng &rng) {
    if (const auto *sv = std::get_if<StateVector>(&s)) {
        auto m = measure_predicate(*sv, pred, rng);
        return UnitMeasurement{m.bit, std::move(m.post_state)};
    }
    const auto &c = std::get<CosetState>(s);
    if (c.space().dim() > kMaxSymbolicEnumerationDim) {
        throw Error(ErrorCode::kBackendCapacity, "coset state too large for symbolic measurement");
    }
    std::vector<BitVec> accepted;
    std::vector<BitVec> rejected;
    for (uint64_t k = 0; k < (uint64_t{1} << c.space().dim()); k++) {
        BitVec v = c.space().element(k) ^ c.shift();
        (pred(v) ? accepted : rejected).push_back(std::move(v));
    }
    bool bit = sample_outcome(static_cast<double>(rejected.size()), static_cast<double>(accepted.size()), rng);
    const auto &outcome = bit ? accepted : rejected;
    if (outcome.size() == (size_t{1} << c.space().dim())) {
        return UnitMeasurement{bit, c};
    }
    if (auto coset = as_coset(outcome, c.lambda())) {
        return UnitMeasurement{bit, CosetState(std::move(coset->first), coset->second, c.phase())};
    }
    if (c.lambda() > kMaxStatevectorQubits) {
        throw Error(ErrorCode::kUnsupportedState, "measurement outcome is not a coset and too large to densify");
    }
    std::vector<Amplitude> amps(size_t{1} << c.lambda(), 0.0);
    double mag = 1.0 / std::sqrt(static_cast<double>(outcome.size()));
    for (const auto &v : outcome) {
        amps[v.to_index()] = mag * sign_of(c.phase().dot(v ^ c.shift()));
    }
    return UnitMeasurement{bit, StateVector::from_amplitudes(c.lambda(), std::move(amps))};
}

}  // namespace qucoin
