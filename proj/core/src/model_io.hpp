#pragma once

// Token-level helpers shared by the model serializers.

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "physioemo/error.hpp"
#include "physioemo/text.hpp"

namespace physioemo::detail {

class StateWriter {
 public:
  explicit StateWriter(std::string& out) : out_(out) {}

  void scalar(std::string_view key, double v) {
    out_.append(key).append(" ").append(text::format_double(v)).append("\n");
  }
  void count(std::string_view key, std::size_t v) {
    out_.append(key).append(" ").append(std::to_string(v)).append("\n");
  }
  void word(std::string_view key, std::string_view v) {
    out_.append(key).append(" ").append(v).append("\n");
  }
  void vector(std::string_view key, const Eigen::VectorXd& v) {
    out_.append(key).append(" ").append(std::to_string(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out_.append(" ").append(text::format_double(v[i]));
    out_.append("\n");
  }
  void matrix(std::string_view key, const Eigen::MatrixXd& m) {
    out_.append(key).append(" ").append(std::to_string(m.rows())).append(" ")
        .append(std::to_string(m.cols())).append("\n");
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out_.append(" ");
        out_.append(text::format_double(m(r, c)));
      }
      out_.append("\n");
    }
  }

 private:
  std::string& out_;
};

class StateReader {
 public:
  explicit StateReader(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\n' || text[i] == '\t' ||
                                 text[i] == '\r'))
        ++i;
      const std::size_t start = i;
      while (i < text.size() && !(text[i] == ' ' || text[i] == '\n' || text[i] == '\t' ||
                                  text[i] == '\r'))
        ++i;
      if (i > start) tokens_.emplace_back(text.substr(start, i - start));
    }
  }

  bool done() const noexcept { return pos_ >= tokens_.size(); }
  std::string_view peek() const { return done() ? std::string_view{} : tokens_[pos_]; }

  std::string_view token() {
    if (done()) fail("unexpected end of model text");
    return tokens_[pos_++];
  }
  void expect(std::string_view key) {
    const auto t = token();
    if (t != key) fail("expected '" + std::string(key) + "', found '" + std::string(t) + "'");
  }
  double number() {
    const auto t = token();
    const auto v = text::parse_double(t);
    if (!v) fail("bad number '" + std::string(t) + "'");
    return *v;
  }
  std::size_t count() {
    const double v = number();
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) fail("bad count");
    return static_cast<std::size_t>(v);
  }
  double scalar(std::string_view key) {
    expect(key);
    return number();
  }
  std::size_t count(std::string_view key) {
    expect(key);
    return count();
  }
  std::string word(std::string_view key) {
    expect(key);
    return std::string(token());
  }
  Eigen::VectorXd vector(std::string_view key) {
    expect(key);
    Eigen::VectorXd v(static_cast<Eigen::Index>(count()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = number();
    return v;
  }
  Eigen::MatrixXd matrix(std::string_view key) {
    expect(key);
    const auto rows = static_cast<Eigen::Index>(count());
    const auto cols = static_cast<Eigen::Index>(count());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number();
    return m;
  }

  [[noreturn]] static void fail(const std::string& what) {
    throw Error(ErrorKind::MalformedRow, "model text: " + what);
  }

 private:
  std::vector<std::string_view> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace physioemo::detail
