#include <bertha/device.hpp>
#include <cmath>
#include <stdexcept>

namespace bertha {

device::device(double start, double end)
  : m_start(start)
  , m_end(end)
{
  if (!std::isfinite(start) || !std::isfinite(end)) {
    throw std::invalid_argument("coordinates must be finite");
  }
  if (end < start) {
    throw std::invalid_argument("end coordinate is smaller than start");
  }
}

device::device(double length)
  : m_start(0.0)
  , m_end(length)
{
  if (!std::isfinite(length)) {
    throw std::invalid_argument("length must be finite");
  }
  if (length < 0.0) {
    throw std::invalid_argument("length must not be negative");
  }
}

double
device::get_start() const
{
  return m_start;
}

double
device::get_end() const
{
  return m_end;
}

double
device::get_length() const
{
  return m_end - m_start;
}
}
