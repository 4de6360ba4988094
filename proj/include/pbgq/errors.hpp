#pragma once

#include <stdexcept>
#include <string>

namespace pbgq {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or inconsistent configuration. `field()` names the
/// offending quantity (e.g. "v" or "segments[2].v_m_per_s").
class ConfigError : public Error
{
public:
    ConfigError(std::string field, std::string what)
        : Error(field.empty() ? what : field + ": " + what), m_field(std::move(field)), m_detail(std::move(what))
    {
    }
    const std::string& field() const noexcept { return m_field; }
    /// The message without the field prefix.
    const std::string& detail() const noexcept { return m_detail; }

    /// Same error with `prefix` prepended to the field path.
    ConfigError nested(const std::string& prefix) const
    {
        return {m_field.empty() ? prefix : prefix + "." + m_field, m_detail};
    }

private:
    std::string m_field;
    std::string m_detail;
};

/// A photon occupation above the Fock-space cutoff was requested.
class TruncationError : public Error
{
public:
    using Error::Error;
};

class DegenerateMeasurementError : public Error
{
public:
    using Error::Error;
};

class ConvergenceError : public Error
{
public:
    using Error::Error;
};

/// Detuning too small compared to the coupling for the second-order
/// (dressed-shift) phase prediction to hold.
class DispersiveRegimeError : public Error
{
public:
    using Error::Error;
};

/// Wraps a failure raised while executing a flight-plan segment.
class SegmentError : public Error
{
public:
    SegmentError(std::size_t index, const std::string& what)
        : Error("segment " + std::to_string(index) + ": " + what), m_index(index)
    {
    }
    std::size_t segment_index() const noexcept { return m_index; }

private:
    std::size_t m_index;
};

} // namespace pbgq
