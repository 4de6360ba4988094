#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pbgq/errors.hpp"

namespace pbgq {

enum class AtomLevel : int { e = 0, g = 1 };

inline char to_char(AtomLevel l) { return l == AtomLevel::e ? 'e' : 'g'; }

struct AtomSpecies
{
    double omega_a = 0; ///< transition angular frequency (rad/s)
    double d21 = 0;     ///< dipole moment magnitude (C m)
    std::string label;

    void validate() const
    {
        if (!(omega_a > 0))
            throw ConfigError("omega_a", "must be > 0");
        if (!(d21 > 0))
            throw ConfigError("d21", "must be > 0");
    }
    bool operator==(const AtomSpecies&) const = default;
};

/// A localized defect mode. Q is infinite (lossless) unless set.
struct DefectMode
{
    std::string name;
    double omega_d = 0;
    double R_def = 0;
    double lattice_a = 0;
    double phi = 0;
    double Q = std::numeric_limits<double>::infinity();

    void validate() const
    {
        if (!(omega_d > 0))
            throw ConfigError("omega_d", "must be > 0");
        if (!(R_def > 0))
            throw ConfigError("R_def", "must be > 0");
        if (!(lattice_a > 0))
            throw ConfigError("lattice_a", "must be > 0");
        if (!(Q > 0))
            throw ConfigError("Q", "must be > 0");
    }
    bool operator==(const DefectMode&) const = default;
};

struct BasisLabel
{
    AtomLevel atom = AtomLevel::g;
    std::vector<int> occupations;

    bool operator==(const BasisLabel&) const = default;

    /// "e,0,1" style label: atom first, then occupations in registry order.
    std::string to_string() const
    {
        std::string s(1, to_char(atom));
        for (int n : occupations)
            s += "," + std::to_string(n);
        return s;
    }
};

/**
 * State vector of one two-level atom and K single-mode defect fields, each
 * truncated at n_max photons.
 *
 * Basis ordering is fixed: the atom index is slowest (e = 0, g = 1), then the
 * modes in registry order, with the photon number of the last mode fastest.
 * So for K = 2, n_max = 1 the order is |e,0,0>, |e,0,1>, |e,1,0>, |e,1,1>,
 * |g,0,0>, ... Amplitudes live in the frame rotating at each mode's omega_d.
 */
template <class Real>
class BasicJointState
{
public:
    using Scalar = Real;
    using Complex = std::complex<Real>;
    using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
    using Index = Eigen::Index;

    BasicJointState(std::vector<DefectMode> modes, int n_max, Vector amplitudes)
        : m_modes(std::move(modes)), m_nmax(n_max), m_amps(std::move(amplitudes))
    {
        if (m_modes.empty())
            throw ConfigError("modes", "at least one mode is required");
        if (n_max < 1)
            throw ConfigError("n_max", "must be >= 1");
        if (m_amps.size() != expected_dim())
            throw ConfigError("amplitudes", "length " + std::to_string(m_amps.size()) +
                                                " does not match 2*(n_max+1)^K = " +
                                                std::to_string(expected_dim()));
    }

    Index dim() const { return m_amps.size(); }
    int mode_count() const { return static_cast<int>(m_modes.size()); }
    int n_max() const { return m_nmax; }
    const std::vector<DefectMode>& modes() const { return m_modes; }
    const Vector& amplitudes() const { return m_amps; }

    /// Copy of this state (same registry and cutoff) carrying new amplitudes.
    BasicJointState with_amplitudes(Vector amps) const { return {m_modes, m_nmax, std::move(amps)}; }

    Index levels() const { return m_nmax + 1; }

    /// Number of basis states per atomic level, (n_max+1)^K.
    Index field_dim() const
    {
        Index d = 1;
        for (std::size_t k = 0; k < m_modes.size(); ++k)
            d *= levels();
        return d;
    }

    /// Index stride of a photon in `mode`.
    Index stride(int mode) const
    {
        Index s = 1;
        for (int k = mode_count() - 1; k > mode; --k)
            s *= levels();
        return s;
    }

    AtomLevel atom_level(Index i) const { return i < field_dim() ? AtomLevel::e : AtomLevel::g; }
    int occupation(Index i, int mode) const { return static_cast<int>((i / stride(mode)) % levels()); }

    Index index_of(const BasisLabel& label) const
    {
        if (static_cast<int>(label.occupations.size()) != mode_count())
            throw ConfigError("occupations", "expected " + std::to_string(mode_count()) +
                                                 " entries, got " +
                                                 std::to_string(label.occupations.size()));
        Index i = label.atom == AtomLevel::e ? 0 : field_dim();
        for (int k = 0; k < mode_count(); ++k) {
            const int n = label.occupations[k];
            if (n < 0)
                throw ConfigError("occupations", "negative photon number");
            if (n > m_nmax)
                throw TruncationError("occupation " + std::to_string(n) + " of mode " +
                                      std::to_string(k) + " exceeds n_max = " +
                                      std::to_string(m_nmax));
            i += n * stride(k);
        }
        return i;
    }

    BasisLabel label_of(Index i) const
    {
        BasisLabel l{atom_level(i), std::vector<int>(m_modes.size())};
        for (int k = 0; k < mode_count(); ++k)
            l.occupations[k] = occupation(i, k);
        return l;
    }

    Complex amplitude(const BasisLabel& label) const { return m_amps[index_of(label)]; }
    Real norm_squared() const { return m_amps.squaredNorm(); }

private:
    Index expected_dim() const { return 2 * field_dim(); }

    std::vector<DefectMode> m_modes;
    int m_nmax;
    Vector m_amps;
};

using JointState = BasicJointState<double>;

template <class Real = double>
BasicJointState<Real> build_state(AtomLevel atom, std::vector<int> occupations,
                                  std::vector<DefectMode> modes, int n_max = 1)
{
    if (modes.empty())
        throw ConfigError("modes", "at least one mode is required");
    if (occupations.size() != modes.size())
        throw ConfigError("occupations", "expected " + std::to_string(modes.size()) +
                                             " entries, got " + std::to_string(occupations.size()));
    using State = BasicJointState<Real>;
    Eigen::Index dim = 2;
    for (std::size_t k = 0; k < modes.size(); ++k)
        dim *= n_max + 1;
    State s(std::move(modes), n_max, State::Vector::Zero(dim));
    typename State::Vector amps = State::Vector::Zero(dim);
    amps[s.index_of(BasisLabel{atom, std::move(occupations)})] = 1;
    return s.with_amplitudes(std::move(amps));
}

/// <sigma_ee + sum_k n_k>, normalized by the state norm.
template <class Real>
Real excitation_number(const BasicJointState<Real>& s)
{
    Real num = 0;
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        int n = s.atom_level(i) == AtomLevel::e ? 1 : 0;
        for (int k = 0; k < s.mode_count(); ++k)
            n += s.occupation(i, k);
        num += std::norm(s.amplitudes()[i]) * n;
    }
    return num / s.norm_squared();
}

template <class Real>
Real atom_population(const BasicJointState<Real>& s, AtomLevel level)
{
    const auto n = s.field_dim();
    const auto& a = s.amplitudes();
    const Real pe = a.head(n).squaredNorm();
    const Real pg = a.tail(n).squaredNorm();
    return (level == AtomLevel::e ? pe : pg) / (pe + pg);
}

/// Photon-number distribution P(0..n_max) of one mode.
template <class Real>
std::vector<Real> mode_population(const BasicJointState<Real>& s, int mode)
{
    if (mode < 0 || mode >= s.mode_count())
        throw std::out_of_range("mode index " + std::to_string(mode) + " out of range [0, " +
                                std::to_string(s.mode_count()) + ")");
    std::vector<Real> p(s.n_max() + 1, Real(0));
    for (Eigen::Index i = 0; i < s.dim(); ++i)
        p[s.occupation(i, mode)] += std::norm(s.amplitudes()[i]);
    const Real total = s.norm_squared();
    for (auto& x : p)
        x /= total;
    return p;
}

template <class Real>
struct MeasurementRecord
{
    AtomLevel outcome;
    Real probability;
    BasicJointState<Real> collapsed_state;
    std::uint64_t seed;
};

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit Mersenne
/// twister draw. Avoids std::uniform_real_distribution, whose output is
/// library-specific.
inline double seeded_uniform(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Projective measurement of the atom. Same seed, same outcome.
template <class Real>
MeasurementRecord<Real> measure_atom(const BasicJointState<Real>& s, std::uint64_t seed)
{
    const auto n = s.field_dim();
    const auto& a = s.amplitudes();
    const Real pe = a.head(n).squaredNorm();
    const Real pg = a.tail(n).squaredNorm();
    const Real total = pe + pg;
    if (!(total > 0))
        throw DegenerateMeasurementError("cannot measure a zero-norm state");

    const AtomLevel outcome = seeded_uniform(seed) < pe / total ? AtomLevel::e : AtomLevel::g;
    const Real p = (outcome == AtomLevel::e ? pe : pg) / total;
    if (!(p > 0))
        throw DegenerateMeasurementError("projected subspace has zero norm");

    typename BasicJointState<Real>::Vector collapsed = BasicJointState<Real>::Vector::Zero(s.dim());
    if (outcome == AtomLevel::e)
        collapsed.head(n) = a.head(n) / std::sqrt(pe);
    else
        collapsed.tail(n) = a.tail(n) / std::sqrt(pg);
    return {outcome, p, s.with_amplitudes(std::move(collapsed)), seed};
}

} // namespace pbgq
