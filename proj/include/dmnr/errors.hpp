// Error types shared by the whole toolkit. Everything derives from
// dmnr::Error so callers can catch one base for "toolkit failure" and
// still distinguish cases when they need to.

#ifndef DMNR_ERRORS_HPP
#define DMNR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dmnr {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Operation requires at least one point.
class EmptyCloudError : public Error {
  public:
    using Error::Error;
};

// A neighbor query needs at least one point other than the query itself.
class EmptyNeighborhoodError : public Error {
  public:
    using Error::Error;
};

// Clustering input is smaller than min_cluster_size.
class TooFewPointsError : public Error {
  public:
    using Error::Error;
};

// Two per-point sequences that must cover the same cloud do not.
class LengthMismatchError : public Error {
  public:
    using Error::Error;
};

// Evaluation asked for ground truth on a cloud without labels.
class MissingLabelsError : public Error {
  public:
    using Error::Error;
};

class EmptyDatasetError : public Error {
  public:
    using Error::Error;
};

class InvalidSpecError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

// Filesystem-level failure (open/read/write).
class IoError : public Error {
  public:
    using Error::Error;
};

// File opened fine but its contents violate the format.
class MalformedFileError : public Error {
  public:
    using Error::Error;
};

// A decoded coordinate or intensity is NaN or infinite.
class NonFiniteError : public Error {
  public:
    using Error::Error;
};

// Wraps any frame-level failure during dataset evaluation with the frame id.
class FrameError : public Error {
  public:
    FrameError(const std::string& frame_id, const std::string& what)
        : Error("frame '" + frame_id + "': " + what), frame_id_(frame_id) {}

    const std::string& frame_id() const noexcept { return frame_id_; }

  private:
    std::string frame_id_;
};

}  // namespace dmnr

#endif  // DMNR_ERRORS_HPP
