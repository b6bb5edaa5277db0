#ifndef BERTHA_DEVICE_HPP
#define BERTHA_DEVICE_HPP

namespace bertha {

/**
 * \brief A one-dimensional device between two coordinates.
 *
 * The coordinates are dimensionless. A device always satisfies
 * end >= start; zero-length devices are allowed.
 */
class device
{
public:
  /**
   * \brief Constructs a device from its start and end coordinates.
   *
   * \throws std::invalid_argument if a coordinate is not finite or if
   *         \p end is smaller than \p start.
   */
  device(double start, double end);

  /**
   * \brief Constructs a device of the given length starting at the origin.
   *
   * \throws std::invalid_argument if \p length is negative or not finite.
   */
  explicit device(double length);

  /** \brief Returns the start coordinate. */
  double get_start() const;

  /** \brief Returns the end coordinate. */
  double get_end() const;

  /** \brief Returns the length of the device (end - start). */
  double get_length() const;

private:
  double m_start;
  double m_end;
};
}

#endif
